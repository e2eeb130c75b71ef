#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ebandit/model.hpp"

namespace ebandit {

struct ScaledNode {
    double v1 = 0.0;
    double v2 = 0.0;
    double weight = 0.0;
};

// Prior over standardized mean offsets in the near-critical regime where
// m_l = m + sqrt(D/N) v_l. D is the one-step income variance; for the
// exponential bandit D = m^2.
class ScaledPrior {
public:
    ScaledPrior(std::vector<ScaledNode> nodes, double m, double D, int N);

    static ScaledPrior exponential(std::vector<ScaledNode> nodes, double m, int N) {
        return ScaledPrior(std::move(nodes), m, m * m, N);
    }

    const std::vector<ScaledNode>& nodes() const { return nodes_; }
    double m() const { return m_; }
    double D() const { return D_; }
    int N() const { return N_; }

    double mean_abs_gap() const;  // E|v2 - v1|

    // Finite-N prior this scaling corresponds to.
    DiscretePrior to_prior() const;

private:
    std::vector<ScaledNode> nodes_;
    double m_;
    double D_;
    int N_;
};

struct ScaledState {
    double x1 = 0.0;
    double t1 = 0.0;
    double x2 = 0.0;
    double t2 = 0.0;
};

// Standardized history coordinates: t = n/N, x = (X - n m) / sqrt(D N).
ScaledState scale_state(const BanditState& s, const ScaledPrior& sp);
BanditState unscale_state(const ScaledState& s, const ScaledPrior& sp);

// Scaled gap densities (both arms).
std::pair<double, double> g_limit(double x1, double t1, double x2, double t2,
                                  const ScaledPrior& sp);

// Pre-limit income kernel in standardized units at time fraction t and
// drift coordinate x_hat = x/t; zero below y = -1. Requires 1 + sqrt(eps) *
// x_hat > 0 (nonnegative cumulative income).
double f_kernel(double y, double t, double x_hat, double eps);

// Symmetric uniform x axis with step h sqrt(eps).
struct ScaledAxis {
    double x_min = 0.0;
    double step = 1.0;
    int count = 1;

    double coord(int i) const { return x_min + step * i; }
    double x_max() const { return coord(count - 1); }
};

ScaledAxis make_scaled_axis(double x_span, double h, double eps);

struct ScaledFieldSlice {
    int i1 = 0;  // t1 = i1 * eps
    int i2 = 0;
    std::vector<double> r;   // min of the two branch values
    std::vector<double> r1;  // arm-1 branch
    std::vector<double> r2;
};

// Slices of the scaled backward solve retained by the caller's request; the
// full 4D field is never materialized.
class ScaledField {
public:
    ScaledField(double eps, ScaledAxis axis) : eps_(eps), axis_(axis) {}

    double eps() const { return eps_; }
    const ScaledAxis& axis() const { return axis_; }
    int steps() const { return static_cast<int>(std::lround(1.0 / eps_)); }

    const ScaledFieldSlice* find(int i1, int i2) const;
    void add(ScaledFieldSlice s) { slices_.push_back(std::move(s)); }
    const std::vector<ScaledFieldSlice>& slices() const { return slices_; }

    std::vector<std::string> warnings;

private:
    double eps_;
    ScaledAxis axis_;
    std::vector<ScaledFieldSlice> slices_;
};

struct LimitSolveOptions {
    double x_span = 8.0;
    double h = 1.0;                    // x-step in units of sqrt(eps)
    std::vector<double> retain_eps0;   // (i, i) slices to keep, as t values
    bool retain_all = false;
    int threads = 0;
};

ScaledField solve_integro_difference_exponential(const ScaledPrior& sp, double eps,
                                                 const LimitSolveOptions& opts = {});
ScaledField solve_integro_difference_gaussian(const ScaledPrior& sp, double eps,
                                              const LimitSolveOptions& opts = {});

// Explicit finite-difference integration of the limiting free-boundary
// equation on the same diagonal marching pattern, floored at t >= eps0.
ScaledField solve_pde(const ScaledPrior& sp, double eps_grid, double x_span, double eps0,
                      const LimitSolveOptions& opts = {});

// Forced-start risk read off a retained (eps0, eps0) slice.
double scaled_risk(const ScaledField& field, const ScaledPrior& sp, double eps0);

struct FieldDistance {
    double sup_abs_diff = 0.0;
    double sup_a = 0.0;
    double sup_b = 0.0;
    double relative() const {
        const double d = std::max(sup_a, sup_b);
        return d > 0.0 ? sup_abs_diff / d : 0.0;
    }
};

struct CompareResult {
    FieldDistance distance;
    double risk_a = 0.0;
    double risk_b = 0.0;
};

// Lockstep comparison of the exponential and Gaussian recursions on the
// region {t1 + t2 >= t_sum_min, t1 >= t_each_min, t2 >= t_each_min},
// restricted to nodes where the exponential field is defined (nonnegative
// unscaled income on both arms). The per-coordinate floor keeps layers with
// only a handful of pulls — where no central-limit regime exists and the two
// models legitimately differ at order one — out of the sup. When risk_eps0 >
// 0 both scaled risks at that floor are evaluated too.
CompareResult compare_exponential_gaussian(const ScaledPrior& sp, double eps,
                                           double t_sum_min, double t_each_min,
                                           double risk_eps0 = 0.0,
                                           const LimitSolveOptions& opts = {});

// Lockstep comparison of the finite-difference solution against the
// exponential recursion on {t1, t2 >= eps0}, same domain restriction.
CompareResult compare_pde_exponential(const ScaledPrior& sp, double eps, double eps0,
                                      const LimitSolveOptions& opts = {});

namespace limit_detail {

// One diagonal (t1 + t2 = const) of a backward scaled solve.
struct DiagonalSlice {
    int i1 = 0;
    int i2 = 0;
    std::vector<double> r;
    std::vector<double> r1;
    std::vector<double> r2;
};

// Backward marcher interface shared by the two recursions and the
// finite-difference scheme: diagonal() holds t1 + t2 = index() * eps.
class ScaledMarcher {
public:
    virtual ~ScaledMarcher() = default;
    virtual const ScaledAxis& axis() const = 0;
    virtual double eps() const = 0;
    virtual int index() const = 0;  // current diagonal, starts at 1/eps
    virtual int min_index() const = 0;
    virtual void advance() = 0;  // index -> index - 1
    virtual const std::vector<DiagonalSlice>& diagonal() const = 0;
    virtual std::vector<std::string> take_warnings() { return {}; }
};

std::unique_ptr<ScaledMarcher> make_exponential_marcher(const ScaledPrior& sp, double eps,
                                                        const LimitSolveOptions& opts);
std::unique_ptr<ScaledMarcher> make_gaussian_marcher(const ScaledPrior& sp, double eps,
                                                     const LimitSolveOptions& opts);
std::unique_ptr<ScaledMarcher> make_pde_marcher(const ScaledPrior& sp, double eps_grid,
                                                double x_span, double eps0,
                                                const LimitSolveOptions& opts);

// True if the node is inside the exponential solver's domain (both
// standardized incomes correspond to X >= 0).
bool physical_node(double x, int time_index, double eps);

// Shared g evaluation over a whole slice grid.
void fill_g(const ScaledPrior& sp, double t1, double t2, const ScaledAxis& ax,
            std::vector<double>& g1, std::vector<double>& g2);

}  // namespace limit_detail

}  // namespace ebandit
