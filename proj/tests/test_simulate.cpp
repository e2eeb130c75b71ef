#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "ebandit/exact_dp.hpp"
#include "ebandit/simulate.hpp"

using namespace ebandit;

namespace {
DiscretePrior symmetric(double m, double d) {
    return DiscretePrior({{{m + d, m - d}, 0.5}, {{m - d, m + d}, 0.5}});
}
std::shared_ptr<const ValueTable> dp_table(const DiscretePrior& prior, int N, int grid) {
    return std::make_shared<ValueTable>(
        solve_exact(prior, N, GridSpec::for_prior(prior, grid)).table);
}
}  // namespace

TEST_CASE("equal arms have zero expected regret") {
    Policy p = Policy::always_arm(1);
    auto est = simulate_strategy(p, {1.3, 1.3}, 12, 7, 20000);
    CHECK(std::abs(est.mean) <= 3.0 * est.std_error);
}

TEST_CASE("always pulling the worse arm pays the full gap") {
    Policy p = Policy::always_arm(1);
    auto est = simulate_strategy(p, {1.0, 2.0}, 10, 11, 40000);
    CHECK(std::abs(est.mean - 10.0) <= 3.0 * est.std_error);
}

TEST_CASE("estimates are bit-reproducible and thread-count independent") {
    DiscretePrior prior = symmetric(1.0, 0.2);
    Policy p = Policy::greedy(prior);
    auto a = bayes_regret_mc(p, prior, 8, 42, 30000, 1);
    auto b = bayes_regret_mc(p, prior, 8, 42, 30000, 2);
    auto c = bayes_regret_mc(p, prior, 8, 42, 30000, 0);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    CHECK(a.mean == c.mean);
    auto d = bayes_regret_mc(p, prior, 8, 43, 30000, 0);
    CHECK(a.mean != d.mean);
}

TEST_CASE("dp policy against a point mass is regret free") {
    DiscretePrior pm({{{2.0, 1.0}, 1.0}});
    Policy p = Policy::dp(dp_table(pm, 10, 32));
    auto est = bayes_regret_mc(p, pm, 10, 5, 5000);
    CHECK(std::abs(est.mean) <= std::max(3.0 * est.std_error, 1e-12));
}

TEST_CASE("dp estimate matches the solved risk") {
    DiscretePrior prior = symmetric(1.0, 0.3);
    const int N = 6;
    auto res = solve_exact(prior, N, GridSpec::for_prior(prior, 96));
    Policy p = Policy::dp(std::make_shared<ValueTable>(res.table));
    auto est = bayes_regret_mc(p, prior, N, 17, 60000);
    CHECK(std::abs(est.mean - res.risk) <= 3.0 * est.std_error);
}

TEST_CASE("regret estimates stay nonnegative in expectation") {
    DiscretePrior prior = symmetric(1.0, 0.2);
    for (auto policy : {Policy::greedy(prior), Policy::always_arm(2),
                        Policy::epsilon_greedy(prior, 0.1)}) {
        auto est = bayes_regret_mc(policy, prior, 6, 3, 20000);
        CHECK(est.mean >= -3.0 * est.std_error);
    }
}

TEST_CASE("dp policy dominates the baselines") {
    DiscretePrior prior = symmetric(1.0, 0.3);
    const int N = 8;
    Policy dp = Policy::dp(dp_table(prior, N, 96));
    auto dp_est = bayes_regret_mc(dp, prior, N, 23, 60000);
    for (auto baseline : {Policy::greedy(prior), Policy::epsilon_greedy(prior, 0.1),
                          Policy::always_arm(1)}) {
        auto b = bayes_regret_mc(baseline, prior, N, 23, 60000);
        const double combined =
            std::sqrt(dp_est.std_error * dp_est.std_error + b.std_error * b.std_error);
        CHECK(dp_est.mean <= b.mean + 3.0 * combined);
    }
}

TEST_CASE("forced start policy matches the forced-start risk") {
    DiscretePrior prior = symmetric(1.0, 0.2);
    const int N = 4, n0 = 1;
    GridSpec grid = GridSpec::for_prior(prior, 96);
    SolveOptions sub;
    sub.n1_min = sub.n2_min = n0;
    auto table = std::make_shared<ValueTable>(solve_exact(prior, N, grid, sub).table);
    Policy p = Policy::forced_start_then_dp(table, n0);
    auto est = bayes_regret_mc(p, prior, N, 29, 200000);
    const double want = risk_with_forced_start(prior, N, n0, grid);
    CHECK(std::abs(est.mean - want) <= 3.0 * est.std_error);
}
