// Command-line front end: solver runs, Monte Carlo simulation, the
// exponential/Gaussian limit comparison ladder, and the kernel-moment check.
// Configuration comes from a JSON file with flag overrides (flags win);
// every effective parameter is echoed into report.txt so a report alone
// reproduces its run.

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ebandit/exact_dp.hpp"
#include "ebandit/io.hpp"
#include "ebandit/limit.hpp"
#include "ebandit/model.hpp"
#include "ebandit/quadrature.hpp"
#include "ebandit/simulate.hpp"
#include "ebandit/unnorm_dp.hpp"

namespace {

using nlohmann::json;
using namespace ebandit;

struct RunConfig {
    std::string solver = "exact";  // exact|unnorm|limit-exp|limit-gauss|pde|simulate|compare
    std::vector<std::array<double, 3>> prior_nodes;         // (m1, m2, weight)
    std::vector<std::array<double, 3>> scaled_prior_nodes;  // (v1, v2, weight)
    double m = 1.0;
    double D = 0.0;  // 0 = exponential scaling (m^2)
    int N = 8;
    int grid = 64;
    double tail_width = 6.0;
    double eps = 0.0;  // required for the scaled solvers; moments-check defaults to 1e-4
    std::vector<double> eps_ladder;
    double eps0 = 0.05;
    double x_span = 8.0;
    double h = 1.0;
    int n0 = 0;
    std::uint64_t seed = 1;
    int reps = 10000;
    int threads = 0;
    std::string policy = "dp";  // dp|greedy|eps-greedy|forced-dp|arm1|arm2
    double explore_prob = 0.1;
    std::string out_dir = ".";
    bool export_values = false;
};

ScaledPrior make_scaled_prior(const RunConfig& c) {
    if (c.scaled_prior_nodes.empty()) throw std::runtime_error("config: no scaled_prior given");
    std::vector<ScaledNode> nodes;
    for (const auto& r : c.scaled_prior_nodes) nodes.push_back({r[0], r[1], r[2]});
    const double D = c.D > 0.0 ? c.D : c.m * c.m;
    return ScaledPrior(std::move(nodes), c.m, D, c.N);
}

DiscretePrior make_prior(const RunConfig& c) {
    if (!c.prior_nodes.empty()) {
        std::vector<PriorNode> nodes;
        for (const auto& r : c.prior_nodes) nodes.push_back({{r[0], r[1]}, r[2]});
        return DiscretePrior(std::move(nodes));
    }
    if (!c.scaled_prior_nodes.empty()) return make_scaled_prior(c).to_prior();
    throw std::runtime_error("config: no prior given");
}

RunConfig load_config(const std::string& path) {
    RunConfig c;
    if (path.empty()) return c;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    json j = json::parse(in);
    const auto get_nodes = [&](const char* key, std::vector<std::array<double, 3>>& out) {
        if (!j.contains(key)) return;
        for (const auto& row : j.at(key)) {
            if (!row.is_array() || row.size() != 3)
                throw std::runtime_error(std::string(key) + ": rows must be [a, b, weight]");
            out.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
        }
    };
    if (j.contains("solver")) c.solver = j.at("solver").get<std::string>();
    get_nodes("prior", c.prior_nodes);
    get_nodes("scaled_prior", c.scaled_prior_nodes);
    if (j.contains("m")) c.m = j.at("m").get<double>();
    if (j.contains("D")) c.D = j.at("D").get<double>();
    if (j.contains("N")) c.N = j.at("N").get<int>();
    if (j.contains("grid")) c.grid = j.at("grid").get<int>();
    if (j.contains("tail_width")) c.tail_width = j.at("tail_width").get<double>();
    if (j.contains("eps")) c.eps = j.at("eps").get<double>();
    if (j.contains("eps_ladder"))
        for (const auto& e : j.at("eps_ladder")) c.eps_ladder.push_back(e.get<double>());
    if (j.contains("eps0")) c.eps0 = j.at("eps0").get<double>();
    if (j.contains("x_span")) c.x_span = j.at("x_span").get<double>();
    if (j.contains("h")) c.h = j.at("h").get<double>();
    if (j.contains("n0")) c.n0 = j.at("n0").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("reps")) c.reps = j.at("reps").get<int>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
    if (j.contains("policy")) c.policy = j.at("policy").get<std::string>();
    if (j.contains("explore_prob")) c.explore_prob = j.at("explore_prob").get<double>();
    if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();
    if (j.contains("export_values")) c.export_values = j.at("export_values").get<bool>();
    return c;
}

using Report = std::vector<std::pair<std::string, std::string>>;

void add(Report& r, const std::string& k, const std::string& v) { r.emplace_back(k, v); }
void add(Report& r, const std::string& k, double v) { r.emplace_back(k, format_double(v)); }
void add(Report& r, const std::string& k, std::int64_t v) {
    r.emplace_back(k, std::to_string(v));
}

void echo_config(Report& rep, const RunConfig& c) {
    add(rep, "solver", c.solver);
    for (std::size_t i = 0; i < c.prior_nodes.size(); ++i)
        add(rep, "prior." + std::to_string(i),
            format_double(c.prior_nodes[i][0]) + " " + format_double(c.prior_nodes[i][1]) +
                " " + format_double(c.prior_nodes[i][2]));
    for (std::size_t i = 0; i < c.scaled_prior_nodes.size(); ++i)
        add(rep, "scaled_prior." + std::to_string(i),
            format_double(c.scaled_prior_nodes[i][0]) + " " +
                format_double(c.scaled_prior_nodes[i][1]) + " " +
                format_double(c.scaled_prior_nodes[i][2]));
    add(rep, "m", c.m);
    add(rep, "D", c.D > 0.0 ? c.D : c.m * c.m);
    add(rep, "N", static_cast<std::int64_t>(c.N));
    add(rep, "grid", static_cast<std::int64_t>(c.grid));
    add(rep, "tail_width", c.tail_width);
    add(rep, "eps", c.eps);
    add(rep, "eps0", c.eps0);
    add(rep, "x_span", c.x_span);
    add(rep, "h", c.h);
    add(rep, "n0", static_cast<std::int64_t>(c.n0));
    add(rep, "seed", static_cast<std::int64_t>(c.seed));
    add(rep, "reps", static_cast<std::int64_t>(c.reps));
    add(rep, "threads", static_cast<std::int64_t>(c.threads));
    add(rep, "income_quad",
        "gauss-legendre 8x16, z_max " + format_double(detail::income_quad_zmax()));
}

void add_warnings(Report& rep, const std::vector<std::string>& warnings) {
    for (std::size_t i = 0; i < warnings.size(); ++i)
        add(rep, "warning." + std::to_string(i), warnings[i]);
}

int run_solve(const RunConfig& c) {
    Report rep;
    echo_config(rep, c);
    const auto t0 = std::chrono::steady_clock::now();
    const std::filesystem::path out(c.out_dir);
    std::filesystem::create_directories(out);

    if (c.solver == "exact" || c.solver == "unnorm") {
        const DiscretePrior prior = make_prior(c);
        const GridSpec grid = GridSpec::for_prior(prior, c.grid, c.tail_width);
        const GridSpec half = GridSpec::for_prior(prior, std::max(2, c.grid / 2), c.tail_width);
        SolveOptions opts{c.threads, 0, 0};
        double risk = 0.0, risk_half = 0.0;
        SolveDiagnostics diag;
        if (c.solver == "exact") {
            if (c.n0 > 0) {
                risk = risk_with_forced_start(prior, c.N, c.n0, grid, opts, &diag);
                risk_half = risk_with_forced_start(prior, c.N, c.n0, half, opts);
            } else {
                auto res = solve_exact(prior, c.N, grid, opts);
                risk = res.risk;
                diag = res.diag;
                risk_half = solve_exact(prior, c.N, half, opts).risk;
                if (c.export_values)
                    export_value_table_csv((out / "values.csv").string(), res.table);
            }
        } else {
            if (c.n0 > 0) {
                risk = risk_unnorm_forced_start(prior, c.N, c.n0, grid, opts, &diag);
                risk_half = risk_unnorm_forced_start(prior, c.N, c.n0, half, opts);
            } else {
                auto res = solve_unnorm(prior, c.N, grid, opts);
                risk = res.risk;
                diag = res.diag;
                risk_half = solve_unnorm(prior, c.N, half, opts).risk;
                if (c.export_values)
                    export_value_table_csv((out / "values.csv").string(), res.table);
            }
        }
        add(rep, "risk", risk);
        add(rep, "risk_half_grid", risk_half);
        add(rep, "solve_seconds", diag.seconds);
        add_warnings(rep, diag.warnings);
    } else if (c.solver == "limit-exp" || c.solver == "limit-gauss" || c.solver == "pde") {
        if (!(c.eps > 0.0)) throw std::runtime_error("config: scaled solvers need eps > 0");
        const ScaledPrior sp = make_scaled_prior(c);
        LimitSolveOptions opts;
        opts.x_span = c.x_span;
        opts.h = c.h;
        opts.threads = c.threads;
        opts.retain_eps0 = {c.eps0};
        const auto run = [&](const LimitSolveOptions& o) {
            if (c.solver == "limit-exp")
                return solve_integro_difference_exponential(sp, c.eps, o);
            if (c.solver == "limit-gauss")
                return solve_integro_difference_gaussian(sp, c.eps, o);
            return solve_pde(sp, c.eps, c.x_span, c.eps0, o);
        };
        ScaledField field = run(opts);
        LimitSolveOptions coarse_opts = opts;
        coarse_opts.h = 2.0 * c.h;
        ScaledField coarse = run(coarse_opts);
        add(rep, "risk", scaled_risk(field, sp, c.eps0));
        add(rep, "risk_half_grid", scaled_risk(coarse, sp, c.eps0));
        add_warnings(rep, field.warnings);
        if (c.export_values) export_scaled_field_csv((out / "values.csv").string(), field);
    } else {
        throw std::runtime_error("unknown solver: " + c.solver);
    }
    add(rep, "wall_seconds",
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    write_report((out / "report.txt").string(), rep);
    for (const auto& [k, v] : rep)
        if (k == "risk" || k == "risk_half_grid") std::printf("%s=%s\n", k.c_str(), v.c_str());
    return 0;
}

int run_simulate(const RunConfig& c) {
    Report rep;
    echo_config(rep, c);
    add(rep, "policy", c.policy);
    const auto t0 = std::chrono::steady_clock::now();
    const std::filesystem::path out(c.out_dir);
    std::filesystem::create_directories(out);

    const DiscretePrior prior = make_prior(c);
    const GridSpec grid = GridSpec::for_prior(prior, c.grid, c.tail_width);
    SolveOptions opts{c.threads, 0, 0};

    Policy policy = [&]() -> Policy {
        if (c.policy == "dp") {
            auto table = std::make_shared<ValueTable>(solve_exact(prior, c.N, grid, opts).table);
            return Policy::dp(std::move(table));
        }
        if (c.policy == "greedy") return Policy::greedy(prior);
        if (c.policy == "eps-greedy") return Policy::epsilon_greedy(prior, c.explore_prob);
        if (c.policy == "forced-dp") {
            SolveOptions sub = opts;
            sub.n1_min = sub.n2_min = c.n0;
            auto table = std::make_shared<ValueTable>(solve_exact(prior, c.N, grid, sub).table);
            return Policy::forced_start_then_dp(std::move(table), c.n0);
        }
        if (c.policy == "arm1") return Policy::always_arm(1);
        if (c.policy == "arm2") return Policy::always_arm(2);
        throw std::runtime_error("unknown policy: " + c.policy);
    }();

    const RegretEstimate est = bayes_regret_mc(policy, prior, c.N, c.seed, c.reps, c.threads);
    add(rep, "regret_mean", est.mean);
    add(rep, "regret_std_error", est.std_error);
    add(rep, "replications", static_cast<std::int64_t>(est.replications));
    add(rep, "wall_seconds",
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    write_report((out / "report.txt").string(), rep);

    std::ofstream csv(out / "simulate.csv");
    csv << "policy,N,seed,replications,mean,std_error\n"
        << c.policy << ',' << c.N << ',' << c.seed << ',' << est.replications << ','
        << format_double(est.mean) << ',' << format_double(est.std_error) << "\n";
    std::printf("regret_mean=%s std_error=%s\n", format_double(est.mean).c_str(),
                format_double(est.std_error).c_str());
    return 0;
}

int run_compare(const RunConfig& c) {
    Report rep;
    echo_config(rep, c);
    const auto t0 = std::chrono::steady_clock::now();
    const std::filesystem::path out(c.out_dir);
    std::filesystem::create_directories(out);

    const ScaledPrior sp = make_scaled_prior(c);
    LimitSolveOptions opts;
    opts.x_span = c.x_span;
    opts.h = c.h;
    opts.threads = c.threads;
    std::vector<double> ladder = c.eps_ladder;
    if (ladder.empty()) {
        if (!(c.eps > 0.0)) throw std::runtime_error("config: compare needs eps or eps_ladder");
        ladder = {c.eps};
    }

    std::vector<CompareCsvRow> rows;
    for (double eps : ladder) {
        const int steps = static_cast<int>(std::lround(1.0 / eps));
        const double risk_eps0 =
            std::abs(std::lround(c.eps0 / eps) * eps - c.eps0) < 1e-9 ? c.eps0 : 0.0;
        auto res = compare_exponential_gaussian(sp, eps, 0.2, c.eps0, risk_eps0, opts);
        rows.push_back({eps, res.distance.relative(), res.risk_a, res.risk_b});
        add(rep, "distance.eps_1_" + std::to_string(steps), res.distance.relative());
        if (risk_eps0 > 0.0) {
            add(rep, "risk_exponential.eps_1_" + std::to_string(steps), res.risk_a);
            add(rep, "risk_gaussian.eps_1_" + std::to_string(steps), res.risk_b);
        }
        std::printf("eps=%s distance=%s\n", format_double(eps).c_str(),
                    format_double(res.distance.relative()).c_str());
    }
    write_compare_csv((out / "compare.csv").string(), rows);
    add(rep, "wall_seconds",
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    write_report((out / "report.txt").string(), rep);
    return 0;
}

int run_moments_check(const RunConfig& c) {
    const double eps = c.eps > 0.0 ? c.eps : 1e-4;
    const double delta = std::sqrt(eps);
    int failures = 0;
    std::printf("kernel moment identities at eps=%s\n", format_double(eps).c_str());
    for (double t : {0.1, 0.5, 0.9}) {
        for (double xh : {-2.0, 0.0, 2.0}) {
            const double k = t / eps;
            const double b = 1.0 + delta * xh;
            const double zmax = k * b * std::expm1(40.0 / (k - 1.0));
            const auto rule = composite_gl16(-1.0, zmax - 1.0, 96);
            double q0 = 0, q1 = 0, q2 = 0;
            for (const auto& n : rule) {
                const double f = f_kernel(n.x, t, xh, eps);
                q0 += n.w * f;
                q1 += n.w * n.x * f;
                q2 += n.w * n.x * n.x * f;
            }
            const double mass_dev = std::abs(q0 - 1.0 - eps / t);
            const double mean_dev = std::abs(q1 - delta * xh);
            const double second_dev = std::abs(q2 - 1.0);
            const bool ok = mass_dev <= 1e-6 && mean_dev <= 5e-4 && second_dev <= 0.02;
            failures += ok ? 0 : 1;
            std::printf("t=%.1f x_hat=%+.0f: mass_dev=%s mean_dev=%s second_dev=%s [%s]\n",
                        t, xh, format_double(mass_dev).c_str(),
                        format_double(mean_dev).c_str(), format_double(second_dev).c_str(),
                        ok ? "pass" : "fail");
        }
    }
    std::printf("moment checks failed at %d of 9 grid points\n", failures);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian two-armed bandit risk solvers"};
    app.require_subcommand(1);

    std::string config_path;
    RunConfig ov;
    bool has_grid = false, has_eps = false, has_eps0 = false, has_n0 = false;
    bool has_seed = false, has_reps = false, has_threads = false, has_out = false;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON configuration file");
        sub->add_option("--out", ov.out_dir, "output directory")
            ->each([&](const std::string&) { has_out = true; });
        sub->add_option("--threads", ov.threads, "worker threads (0 = all cores)")
            ->each([&](const std::string&) { has_threads = true; });
        sub->add_option("--seed", ov.seed, "RNG seed")
            ->each([&](const std::string&) { has_seed = true; });
        sub->add_option("--grid", ov.grid, "income grid nodes per axis")
            ->each([&](const std::string&) { has_grid = true; });
        sub->add_option("--eps", ov.eps, "scaled time step")
            ->each([&](const std::string&) { has_eps = true; });
        sub->add_option("--eps0", ov.eps0, "forced-start floor (scaled)")
            ->each([&](const std::string&) { has_eps0 = true; });
        sub->add_option("--n0", ov.n0, "forced-start pulls per arm")
            ->each([&](const std::string&) { has_n0 = true; });
        sub->add_option("--reps", ov.reps, "Monte Carlo replications")
            ->each([&](const std::string&) { has_reps = true; });
    };

    CLI::App* solve = app.add_subcommand("solve", "run a risk solver");
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo policy evaluation");
    CLI::App* compare = app.add_subcommand("compare", "exponential vs Gaussian limit ladder");
    CLI::App* moments = app.add_subcommand("moments-check", "kernel moment identities");
    for (auto* sub : {solve, simulate, compare, moments}) add_common(sub);
    std::string solver_arg, policy_arg;
    solve->add_option("solver", solver_arg, "exact|unnorm|limit-exp|limit-gauss|pde");
    simulate->add_option("--policy", policy_arg, "dp|greedy|eps-greedy|forced-dp|arm1|arm2");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig c = load_config(config_path);
        if (!solver_arg.empty()) c.solver = solver_arg;
        if (!policy_arg.empty()) c.policy = policy_arg;
        if (has_grid) c.grid = ov.grid;
        if (has_eps) c.eps = ov.eps;
        if (has_eps0) c.eps0 = ov.eps0;
        if (has_n0) c.n0 = ov.n0;
        if (has_seed) c.seed = ov.seed;
        if (has_reps) c.reps = ov.reps;
        if (has_threads) c.threads = ov.threads;
        if (has_out) c.out_dir = ov.out_dir;

        if (app.got_subcommand(simulate)) return run_simulate(c);
        if (app.got_subcommand(compare)) return run_compare(c);
        if (app.got_subcommand(moments)) return run_moments_check(c);
        return run_solve(c);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
