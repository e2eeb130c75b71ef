#pragma once

#include <vector>

#include "ebandit/grid.hpp"
#include "ebandit/model.hpp"

namespace ebandit {

enum class PolicyDecision { Arm1, Arm2, Tie };

// One (n1, n2) layer of the backward induction: the risk triple on the
// income grid, row-major over (X1 index, X2 index). Values are stored times
// 2^-scale_exp; scale_exp is nonzero only when a layer's magnitude falls
// below the renormalization floor (unnormalized tables at large n).
struct ValueSlice {
    int n1 = 0;
    int n2 = 0;
    Axis ax1;
    Axis ax2;
    int scale_exp = 0;
    std::vector<double> r;
    std::vector<double> r1;
    std::vector<double> r2;

    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * ax2.count + j; }
    double scale_factor() const;
    // True (descaled) values.
    double value_r(int i, int j) const { return r[idx(i, j)] * scale_factor(); }
    double value_r1(int i, int j) const { return r1[idx(i, j)] * scale_factor(); }
    double value_r2(int i, int j) const { return r2[idx(i, j)] * scale_factor(); }
};

// Backward-induction value table over all (n1, n2) with n1 + n2 <= N,
// optionally restricted to n1 >= n1_min, n2 >= n2_min (forced starts). The
// same container backs the normalized solver (R) and the unnormalized one
// (the risk-times-marginal table).
class ValueTable {
public:
    ValueTable(int N, GridSpec grid, int n1_min = 0, int n2_min = 0);

    int horizon() const { return N_; }
    int n1_min() const { return n1_min_; }
    int n2_min() const { return n2_min_; }
    const GridSpec& grid() const { return grid_; }

    bool has_slice(int n1, int n2) const;
    ValueSlice& slice(int n1, int n2);
    const ValueSlice& slice(int n1, int n2) const;

    std::vector<ValueSlice>& slices() { return slices_; }
    const std::vector<ValueSlice>& slices() const { return slices_; }

    // Bilinear interpolation of the stored fields at a continuous state.
    // Constant extrapolation beyond each axis.
    double interp_r(const BanditState& s) const;
    double interp_r1(const BanditState& s) const;
    double interp_r2(const BanditState& s) const;

    // Largest true value of r over every slice.
    double max_value() const;

private:
    const std::vector<double> ValueSlice::* field_ptr(int which) const;
    double interp(const BanditState& s, int which) const;

    int N_;
    GridSpec grid_;
    int n1_min_;
    int n2_min_;
    std::vector<ValueSlice> slices_;
    std::vector<int> index_;
};

// Rescales a slice in place when its magnitude drops below 1e-250 so that
// min-comparisons keep relative accuracy.
void maybe_rescale(ValueSlice& s);

}  // namespace ebandit
