#include "ebandit/exact_dp.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>

#include "ebandit/quadrature.hpp"
#include "ebandit/threading.hpp"

namespace ebandit {

namespace detail {

double income_quad_zmax() { return -std::log(1e-8); }

const std::vector<QuadPoint>& income_quad() {
    static const std::vector<QuadPoint> rule = [] {
        std::vector<QuadPoint> out;
        for (const QuadNode& n : composite_gl16(0.0, income_quad_zmax(), 8))
            out.push_back({n.x, n.w * std::exp(-n.x)});
        return out;
    }();
    return rule;
}

}  // namespace detail

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogUnderflow = -690.0;  // ~log(1e-300)

struct NodeParams {
    double m1, m2;
    double gap1, gap2;  // (m2-m1)^+ and (m1-m2)^+
    double inv1, inv2;
    double logw;
    double c1, c2;  // -n log m terms for the current slice
};

std::vector<NodeParams> node_params(const DiscretePrior& prior, int n1, int n2) {
    std::vector<NodeParams> out(prior.size());
    for (std::size_t k = 0; k < prior.size(); ++k) {
        const auto& nd = prior.node(k);
        NodeParams& p = out[k];
        p.m1 = nd.theta.m1;
        p.m2 = nd.theta.m2;
        p.gap1 = std::max(p.m2 - p.m1, 0.0);
        p.gap2 = std::max(p.m1 - p.m2, 0.0);
        p.inv1 = 1.0 / p.m1;
        p.inv2 = 1.0 / p.m2;
        p.logw = nd.weight > 0.0 ? std::log(nd.weight) : kNegInf;
        p.c1 = -n1 * std::log(p.m1);
        p.c2 = -n2 * std::log(p.m2);
    }
    return out;
}

// Interpolated row sum: acc[j] += w * T(pos, j) for all columns, where pos is
// a (clamped) fractional row index into the target slice.
void accumulate_row(const ValueSlice& target, double pos, double w,
                    double* acc, int ncols) {
    int i0;
    double f;
    if (target.ax1.count < 2 || pos <= 0.0) {
        i0 = 0;
        f = 0.0;
    } else if (pos >= target.ax1.count - 1) {
        i0 = target.ax1.count - (target.ax1.count > 1 ? 2 : 1);
        f = target.ax1.count > 1 ? 1.0 : 0.0;
    } else {
        i0 = static_cast<int>(pos);
        f = pos - i0;
    }
    const double* row0 = target.r.data() + target.idx(i0, 0);
    const double* row1 = target.r.data() + target.idx(std::min(i0 + 1, target.ax1.count - 1), 0);
    const double w0 = w * (1.0 - f);
    const double w1 = w * f;
    for (int j = 0; j < ncols; ++j) acc[j] += w0 * row0[j] + w1 * row1[j];
}

// Same along the X2 axis: acc[j] += w * T(i, pos_j) is not needed; arm 2
// integrates at fixed row i with a fractional column position.
inline double lerp_col(const ValueSlice& target, int i, double pos) {
    int j0;
    double f;
    if (target.ax2.count < 2 || pos <= 0.0) {
        j0 = 0;
        f = 0.0;
    } else if (pos >= target.ax2.count - 1) {
        j0 = target.ax2.count - 2;
        f = 1.0;
    } else {
        j0 = static_cast<int>(pos);
        f = pos - j0;
    }
    const double* row = target.r.data() + target.idx(i, 0);
    const int j1 = std::min(j0 + 1, target.ax2.count - 1);
    return (1.0 - f) * row[j0] + f * row[j1];
}

struct SliceStats {
    std::size_t underflow_nodes = 0;
    std::size_t interior_nodes = 0;
};

// Fills one (n1, n2) slice from the two completed successors.
SliceStats compute_slice(const DiscretePrior& prior, ValueTable& table, int n1, int n2,
                         int threads) {
    ValueSlice& out = table.slice(n1, n2);
    const ValueSlice& t1 = table.slice(n1 + 1, n2);
    const ValueSlice& t2 = table.slice(n1, n2 + 1);
    const int ni = out.ax1.count;
    const int nj = out.ax2.count;
    const std::size_t K = prior.size();
    const auto params = node_params(prior, n1, n2);
    const auto& quad = detail::income_quad();

    // Continuation integrals per prior node, in true (descaled) units.
    const double f1 = t1.scale_factor();
    const double f2 = t2.scale_factor();
    std::vector<std::vector<double>> i1(K), i2(K);
    for (std::size_t k = 0; k < K; ++k) {
        i1[k].assign(static_cast<std::size_t>(ni) * nj, 0.0);
        i2[k].assign(static_cast<std::size_t>(ni) * nj, 0.0);
    }

    parallel_for(ni, threads, [&](std::size_t ibegin, std::size_t iend) {
        for (std::size_t i = ibegin; i < iend; ++i) {
            const double x1 = out.ax1.coord(static_cast<int>(i));
            for (std::size_t k = 0; k < K; ++k) {
                double* acc1 = i1[k].data() + i * nj;
                // Arm 1: resample rows of the (n1+1, n2) slice at X1 + m z.
                for (const auto& q : quad) {
                    const double pos = (x1 + params[k].m1 * q.z) / t1.ax1.step;
                    accumulate_row(t1, t1.ax1.count > 1 ? pos : 0.0, q.w * f1, acc1, nj);
                }
                // Arm 2: fixed row i of the (n1, n2+1) slice, column sweep.
                double* acc2 = i2[k].data() + i * nj;
                for (int j = 0; j < nj; ++j) {
                    const double x2 = out.ax2.coord(j);
                    double sum = 0.0;
                    for (const auto& q : quad) {
                        const double pos =
                            t2.ax2.count > 1 ? (x2 + params[k].m2 * q.z) / t2.ax2.step : 0.0;
                        sum += q.w * lerp_col(t2, static_cast<int>(i), pos);
                    }
                    acc2[j] = sum * f2;
                }
            }
        }
    });

    std::atomic<std::size_t> underflow{0};
    parallel_for(ni, threads, [&](std::size_t ibegin, std::size_t iend) {
        std::vector<double> lw(K), qk(K);
        std::size_t local_underflow = 0;
        for (std::size_t i = ibegin; i < iend; ++i) {
            const double x1 = out.ax1.coord(static_cast<int>(i));
            // Node-independent part of the log-marginal, for the underflow
            // diagnostic only.
            double common = -std::lgamma(std::max(n1, 1)) - std::lgamma(std::max(n2, 1));
            if (n1 > 1) common += (n1 - 1) * (x1 > 0.0 ? std::log(x1) : kNegInf);
            for (int j = 0; j < nj; ++j) {
                const double x2 = out.ax2.coord(j);
                double best = kNegInf;
                for (std::size_t k = 0; k < K; ++k) {
                    lw[k] = params[k].logw + params[k].c1 + params[k].c2 -
                            x1 * params[k].inv1 - x2 * params[k].inv2;
                    best = std::max(best, lw[k]);
                }
                double norm = 0.0;
                for (std::size_t k = 0; k < K; ++k) {
                    qk[k] = lw[k] == kNegInf ? 0.0 : std::exp(lw[k] - best);
                    norm += qk[k];
                }
                double r1 = 0.0, r2 = 0.0;
                const std::size_t at = i * nj + j;
                for (std::size_t k = 0; k < K; ++k) {
                    const double q = qk[k] / norm;
                    r1 += q * (params[k].gap1 + i1[k][at]);
                    r2 += q * (params[k].gap2 + i2[k][at]);
                }
                out.r1[at] = r1;
                out.r2[at] = r2;
                out.r[at] = std::min(r1, r2);
                double logm = common + best + std::log(norm);
                if (n2 > 1) logm += (n2 - 1) * (x2 > 0.0 ? std::log(x2) : kNegInf);
                const bool interior = (ni < 2 || (i > 0 && i + 1 < static_cast<std::size_t>(ni))) &&
                                      (nj < 2 || (j > 0 && j + 1 < nj));
                if (interior && logm < kLogUnderflow) ++local_underflow;
            }
        }
        underflow += local_underflow;
    });

    maybe_rescale(out);
    SliceStats st;
    st.underflow_nodes = underflow.load();
    const std::size_t rows = ni == 1 ? 1 : (ni > 2 ? ni - 2 : 0);
    const std::size_t cols = nj == 1 ? 1 : (nj > 2 ? nj - 2 : 0);
    st.interior_nodes = rows * cols;
    return st;
}

}  // namespace

std::pair<double, double> bellman_backup_exact(const DiscretePrior& prior,
                                               const BanditState& state,
                                               const ValueTable& next) {
    const std::vector<double> q = posterior_weights(prior, state);
    const auto& quad = detail::income_quad();
    double r1 = 0.0, r2 = 0.0;
    for (std::size_t k = 0; k < prior.size(); ++k) {
        const Theta th = prior.node(k).theta;
        double cont1 = 0.0, cont2 = 0.0;
        for (const auto& p : quad) {
            cont1 += p.w * next.interp_r(
                               {state.X1 + th.m1 * p.z, state.n1 + 1, state.X2, state.n2});
            cont2 += p.w * next.interp_r(
                               {state.X1, state.n1, state.X2 + th.m2 * p.z, state.n2 + 1});
        }
        r1 += q[k] * (std::max(th.m2 - th.m1, 0.0) + cont1);
        r2 += q[k] * (std::max(th.m1 - th.m2, 0.0) + cont2);
    }
    return {r1, r2};
}

ExactSolveResult solve_exact(const DiscretePrior& prior, int N, const GridSpec& grid,
                             const SolveOptions& opts) {
    if (N < 1) throw std::invalid_argument("solve_exact: N must be >= 1");
    const auto t0 = std::chrono::steady_clock::now();
    ExactSolveResult res{ValueTable(N, grid, opts.n1_min, opts.n2_min), 0.0, {}};
    ValueTable& table = res.table;

    bool coarse_grid = false;
    for (int diag = N - 1; diag >= opts.n1_min + opts.n2_min; --diag) {
        for (int n1 = opts.n1_min; n1 <= diag - opts.n2_min; ++n1) {
            const int n2 = diag - n1;
            const SliceStats st = compute_slice(prior, table, n1, n2, opts.threads);
            if (st.interior_nodes > 0 && 2 * st.underflow_nodes > st.interior_nodes)
                coarse_grid = true;
        }
    }
    if (coarse_grid)
        res.diag.warnings.push_back(
            "marginal underflow on most interior nodes of at least one slice; "
            "grid may be too coarse to bracket the posterior mass");

    const ValueSlice& root = table.slice(opts.n1_min, opts.n2_min);
    res.risk = root.value_r(0, 0);
    res.diag.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

double risk_with_forced_start(const DiscretePrior& prior, int N, int n0,
                              const GridSpec& grid, const SolveOptions& opts,
                              SolveDiagnostics* diag) {
    if (n0 < 1 || 2 * n0 >= N)
        throw std::domain_error("risk_with_forced_start: requires 1 <= n0 and 2*n0 < N");
    SolveOptions sub = opts;
    sub.n1_min = n0;
    sub.n2_min = n0;
    ExactSolveResult res = solve_exact(prior, N, grid, sub);
    if (diag) *diag = res.diag;

    const ValueSlice& sl = res.table.slice(n0, n0);
    double integral = 0.0;
    for (int i = 0; i < sl.ax1.count; ++i) {
        const double wi = sl.ax1.step * ((i == 0 || i + 1 == sl.ax1.count) ? 0.5 : 1.0);
        for (int j = 0; j < sl.ax2.count; ++j) {
            const double wj = sl.ax2.step * ((j == 0 || j + 1 == sl.ax2.count) ? 0.5 : 1.0);
            const BanditState s{sl.ax1.coord(i), n0, sl.ax2.coord(j), n0};
            integral += wi * wj * sl.value_r(i, j) * marginal(prior, s);
        }
    }
    return n0 * prior.mean_abs_gap() + integral;
}

PolicyDecision extract_policy(const ValueTable& table, const BanditState& state,
                              double tie_tol) {
    if (state.n1 + state.n2 >= table.horizon())
        throw std::domain_error("extract_policy: no decision at or beyond the horizon");
    const double r1 = table.interp_r1(state);
    const double r2 = table.interp_r2(state);
    if (r1 < r2 - tie_tol) return PolicyDecision::Arm1;
    if (r2 < r1 - tie_tol) return PolicyDecision::Arm2;
    return PolicyDecision::Tie;
}

}  // namespace ebandit
