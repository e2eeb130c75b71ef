#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ebandit/model.hpp"
#include "ebandit/value_table.hpp"

namespace ebandit {

struct SolveOptions {
    int threads = 0;          // 0 = machine parallelism
    int n1_min = 0;           // restriction for forced-start continuations
    int n2_min = 0;
};

struct SolveDiagnostics {
    std::vector<std::string> warnings;
    double seconds = 0.0;
};

struct ExactSolveResult {
    ValueTable table;
    double risk = 0.0;
    SolveDiagnostics diag;
};

// Expected-loss pair (R1, R2) for taking each arm first from `state` and
// continuing optimally, given completed slices (n1+1, n2) and (n1, n2+1) in
// `next`. The income integral uses the solver's Gauss-Legendre rule after
// the exact change of variable z = Y / m per posterior node.
std::pair<double, double> bellman_backup_exact(const DiscretePrior& prior,
                                               const BanditState& state,
                                               const ValueTable& next);

// Full backward induction from the zero terminal layer; risk is the value at
// the empty history.
ExactSolveResult solve_exact(const DiscretePrior& prior, int N, const GridSpec& grid,
                             const SolveOptions& opts = {});

// Risk of the strategy that plays both arms n0 times and then continues
// optimally: the forced-exploration cost plus the marginal-weighted value of
// the (n0, n0) layer, integrated by the trapezoid rule on the layer grid.
double risk_with_forced_start(const DiscretePrior& prior, int N, int n0,
                              const GridSpec& grid, const SolveOptions& opts = {},
                              SolveDiagnostics* diag = nullptr);

// Bayesian-strategy decision at a (possibly off-grid) state with n1+n2 < N.
PolicyDecision extract_policy(const ValueTable& table, const BanditState& state,
                              double tie_tol = 1e-12);

namespace detail {
struct QuadPoint {
    double z;
    double w;  // Gauss-Legendre weight times exp(-z)
};

// Truncation point of the unit-exponential income integral (1 - 1e-8
// quantile) and its composite 8x16 Gauss-Legendre rule.
double income_quad_zmax();
const std::vector<QuadPoint>& income_quad();
}  // namespace detail

}  // namespace ebandit
