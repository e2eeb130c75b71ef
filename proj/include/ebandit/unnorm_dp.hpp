#pragma once

#include <utility>

#include "ebandit/exact_dp.hpp"
#include "ebandit/model.hpp"
#include "ebandit/value_table.hpp"

namespace ebandit {

// The unnormalized solver stores the risk-times-marginal triple in the same
// layered container as the normalized one.
using UnnormValueTable = ValueTable;

// Gap terms of the unnormalized recursion: the prior-weighted likelihood
// mass of each arm being the wrong choice at this history.
std::pair<double, double> g_functions(const DiscretePrior& prior, const BanditState& s);

// Predictive factor n X^{n-1} / (X+Y)^n linking consecutive histories of one
// arm; independent of the arm's mean. X = 0 with n >= 2 returns the limit 0;
// X = 0 with n = 1 has no usable kernel form and is rejected.
double transition_kernel(double X, int n, double Y);

struct UnnormSolveResult {
    UnnormValueTable table;
    double risk = 0.0;
    SolveDiagnostics diag;
};

// Backward induction on the unnormalized table. The income integral is taken
// in closed form against the piecewise-linear stored layer (the kernel's
// moments over a cell are elementary); the first pull of an arm integrates
// the next layer directly, which is the n = 0 form of the kernel identity.
UnnormSolveResult solve_unnorm(const DiscretePrior& prior, int N, const GridSpec& grid,
                               const SolveOptions& opts = {});

double risk_unnorm_forced_start(const DiscretePrior& prior, int N, int n0,
                                const GridSpec& grid, const SolveOptions& opts = {},
                                SolveDiagnostics* diag = nullptr);

// Normalized sup deviation between the unnormalized table and the
// risk-times-marginal product of the normalized one, over shared nodes with
// unnormalized value above `floor`.
struct EquivalenceReport {
    double max_abs_dev = 0.0;
    double table_max = 0.0;
    double normalized = 0.0;  // max_abs_dev / table_max
};

EquivalenceReport recursion_equivalence(const DiscretePrior& prior,
                                        const ValueTable& exact_table,
                                        const ValueTable& unnorm_table,
                                        double floor = 1e-12);

}  // namespace ebandit
