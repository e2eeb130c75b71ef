#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ebandit/exact_dp.hpp"
#include "oracle.hpp"

using namespace ebandit;

namespace {

DiscretePrior symmetric(double m, double d) {
    return DiscretePrior({{{m + d, m - d}, 0.5}, {{m - d, m + d}, 0.5}});
}

const double kSymD02RiskN3 = 0.532640699570;  // strategy-tree oracle, quad tol 1e-10
const double kAsymRiskN3 = 0.358096300612;

DiscretePrior asym() {
    return DiscretePrior({{{1.3, 0.9}, 0.6}, {{0.8, 1.1}, 0.4}});
}

}  // namespace

TEST_CASE("bellman backup with zero continuation") {
    DiscretePrior pm({{{1.5, 1.5}, 1.0}});
    ValueTable zeros(3, GridSpec::for_prior(pm, 16));
    auto [r1, r2] = bellman_backup_exact(pm, {0.3, 1, 0.0, 0}, zeros);
    CHECK(r1 == doctest::Approx(0.0));
    CHECK(r2 == doctest::Approx(0.0));
}

TEST_CASE("bellman backup at a terminal-adjacent state") {
    DiscretePrior pm({{{2.0, 1.0}, 1.0}});
    const int N = 4;
    ValueTable zeros(N, GridSpec::for_prior(pm, 16));
    // n1 + n2 = N - 1: continuation layers are terminal zeros.
    auto [r1, r2] = bellman_backup_exact(pm, {4.1, 2, 1.3, 1}, zeros);
    CHECK(r1 == doctest::Approx(0.0));
    CHECK(r2 == doctest::Approx(1.0));
}

TEST_CASE("bellman backup matches the strategy-tree oracle at N=2") {
    DiscretePrior prior = symmetric(1.0, 0.2);
    GridSpec grid = GridSpec::for_prior(prior, 128);
    auto res = solve_exact(prior, 2, grid);
    auto [r1, r2] = bellman_backup_exact(prior, {0.0, 0, 0.0, 0}, res.table);
    auto ref = oracle::branch_values(oracle::nodes_of(prior), 0, 0, 0, 0, 2);
    CHECK(r1 == doctest::Approx(ref.first).epsilon(5e-4));
    CHECK(r2 == doctest::Approx(ref.second).epsilon(5e-4));
    CHECK(ref.first == doctest::Approx(10.0 / 27.0).epsilon(1e-9));
}

TEST_CASE("solve_exact with a known best arm") {
    DiscretePrior pm({{{2.0, 1.0}, 1.0}});
    GridSpec grid = GridSpec::for_prior(pm, 32);
    for (int N : {1, 3, 6}) {
        auto res = solve_exact(pm, N, grid);
        CHECK(res.risk == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(extract_policy(res.table, {0.0, 0, 0.0, 0}) == PolicyDecision::Arm1);
        if (N > 2) CHECK(extract_policy(res.table, {1.7, 1, 0.4, 1}) == PolicyDecision::Arm1);
    }
}

TEST_CASE("solve_exact one-step risk equals the prior gap") {
    for (double d : {0.1, 0.2, 0.3}) {
        DiscretePrior prior = symmetric(1.0, d);
        auto res = solve_exact(prior, 1, GridSpec::for_prior(prior, 16));
        CHECK(std::abs(res.risk - d) <= 1e-9);
    }
}

TEST_CASE("solve_exact matches the strategy-tree oracle at N=3") {
    DiscretePrior prior = symmetric(1.0, 0.2);
    auto res = solve_exact(prior, 3, GridSpec::for_prior(prior, 128));
    const double ref = oracle::risk(prior, 3);
    CHECK(ref == doctest::Approx(kSymD02RiskN3).epsilon(1e-7));
    CHECK(res.risk == doctest::Approx(ref).epsilon(1e-3));

    auto res2 = solve_exact(asym(), 3, GridSpec::for_prior(asym(), 128));
    const double ref2 = oracle::risk(asym(), 3);
    CHECK(ref2 == doctest::Approx(kAsymRiskN3).epsilon(1e-7));
    CHECK(res2.risk == doctest::Approx(ref2).epsilon(1e-3));
}

TEST_CASE("forced start risk") {
    DiscretePrior flat({{{1.0, 1.0}, 1.0}});
    CHECK(risk_with_forced_start(flat, 6, 1, GridSpec::for_prior(flat, 24)) ==
          doctest::Approx(0.0).epsilon(1e-12));

    DiscretePrior pm({{{2.0, 1.0}, 1.0}});
    CHECK(risk_with_forced_start(pm, 4, 1, GridSpec::for_prior(pm, 32)) ==
          doctest::Approx(1.0).epsilon(1e-9));

    // Forced exploration cannot beat the unconstrained optimum.
    DiscretePrior prior = symmetric(1.0, 0.2);
    GridSpec grid = GridSpec::for_prior(prior, 64);
    const double forced = risk_with_forced_start(prior, 4, 1, grid);
    const double open = solve_exact(prior, 4, grid).risk;
    CHECK(forced >= open);

    CHECK_THROWS_AS(risk_with_forced_start(prior, 4, 2, grid), std::domain_error);
}

TEST_CASE("extract_policy") {
    DiscretePrior prior = symmetric(1.0, 0.2);
    auto res = solve_exact(prior, 2, GridSpec::for_prior(prior, 64));
    CHECK(extract_policy(res.table, {0.0, 0, 0.0, 0}) == PolicyDecision::Tie);
    // A large first income favors staying on arm 1; the N=2 oracle decides
    // by the sign of the posterior mean gap.
    CHECK(extract_policy(res.table, {3.0, 1, 0.0, 0}) == PolicyDecision::Arm1);
    auto branches = oracle::branch_values(oracle::nodes_of(prior), 3.0, 1, 0.0, 0, 2);
    CHECK(branches.first < branches.second);
    CHECK_THROWS_AS(extract_policy(res.table, {1.0, 1, 1.0, 1}, 1e-12), std::domain_error);
}

TEST_CASE("terminal layers are exactly zero and r is the branch minimum") {
    DiscretePrior prior = symmetric(1.0, 0.3);
    auto res = solve_exact(prior, 4, GridSpec::for_prior(prior, 32));
    for (const auto& sl : res.table.slices()) {
        if (sl.n1 + sl.n2 == 4) {
            for (double v : sl.r) CHECK(v == 0.0);
            for (double v : sl.r1) CHECK(v == 0.0);
        }
        for (std::size_t a = 0; a < sl.r.size(); ++a) {
            CHECK(sl.r[a] == std::min(sl.r1[a], sl.r2[a]));
            CHECK(sl.r[a] >= 0.0);
        }
    }
}

TEST_CASE("arm-swap symmetry for a symmetric prior") {
    DiscretePrior prior = symmetric(1.0, 0.25);
    auto res = solve_exact(prior, 4, GridSpec::for_prior(prior, 48));
    for (int n : {1, 2}) {
        const ValueSlice& sl = res.table.slice(n, n);
        for (int i = 0; i < sl.ax1.count; ++i)
            for (int j = 0; j < sl.ax2.count; ++j)
                CHECK(std::abs(sl.value_r(i, j) - sl.value_r(j, i)) <= 1e-9);
    }
}

TEST_CASE("risk is nondecreasing in the horizon and bounded by the gap bound") {
    DiscretePrior prior = symmetric(1.0, 0.2);
    GridSpec grid = GridSpec::for_prior(prior, 48);
    double prev = 0.0;
    for (int N = 1; N <= 4; ++N) {
        const double risk = solve_exact(prior, N, grid).risk;
        CHECK(risk >= prev - 1e-12);
        CHECK(risk <= N * prior.mean_abs_gap() + 1e-12);
        prev = risk;
    }
}

TEST_CASE("scale equivariance") {
    DiscretePrior prior = symmetric(1.0, 0.2);
    DiscretePrior scaled = prior.scaled(3.0);
    auto a = solve_exact(prior, 3, GridSpec::for_prior(prior, 64));
    auto b = solve_exact(scaled, 3, GridSpec::for_prior(scaled, 64));
    CHECK(b.risk == doctest::Approx(3.0 * a.risk).epsilon(1e-6));
    for (const BanditState s :
         {BanditState{0.4, 1, 0.0, 0}, BanditState{1.9, 1, 2.2, 1}, BanditState{0.0, 0, 0.7, 1}}) {
        const BanditState cs{3.0 * s.X1, s.n1, 3.0 * s.X2, s.n2};
        CHECK(extract_policy(a.table, s) == extract_policy(b.table, cs));
    }
}
