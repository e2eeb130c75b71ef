#include "ebandit/value_table.hpp"

#include <cmath>
#include <stdexcept>

namespace ebandit {

double ValueSlice::scale_factor() const {
    return scale_exp == 0 ? 1.0 : std::ldexp(1.0, scale_exp);
}

ValueTable::ValueTable(int N, GridSpec grid, int n1_min, int n2_min)
    : N_(N), grid_(grid), n1_min_(n1_min), n2_min_(n2_min) {
    if (N < 1) throw std::invalid_argument("ValueTable: N must be >= 1");
    if (n1_min < 0 || n2_min < 0 || n1_min + n2_min > N)
        throw std::invalid_argument("ValueTable: bad restriction");
    index_.assign(static_cast<std::size_t>(N + 1) * (N + 1), -1);
    for (int n1 = n1_min; n1 <= N; ++n1) {
        for (int n2 = n2_min; n1 + n2 <= N; ++n2) {
            ValueSlice s;
            s.n1 = n1;
            s.n2 = n2;
            s.ax1 = grid_.axis(n1);
            s.ax2 = grid_.axis(n2);
            const std::size_t sz = static_cast<std::size_t>(s.ax1.count) * s.ax2.count;
            s.r.assign(sz, 0.0);
            s.r1.assign(sz, 0.0);
            s.r2.assign(sz, 0.0);
            index_[static_cast<std::size_t>(n1) * (N + 1) + n2] =
                static_cast<int>(slices_.size());
            slices_.push_back(std::move(s));
        }
    }
}

bool ValueTable::has_slice(int n1, int n2) const {
    if (n1 < 0 || n2 < 0 || n1 > N_ || n2 > N_ || n1 + n2 > N_) return false;
    return index_[static_cast<std::size_t>(n1) * (N_ + 1) + n2] >= 0;
}

ValueSlice& ValueTable::slice(int n1, int n2) {
    if (!has_slice(n1, n2)) throw std::domain_error("ValueTable: slice out of range");
    return slices_[index_[static_cast<std::size_t>(n1) * (N_ + 1) + n2]];
}

const ValueSlice& ValueTable::slice(int n1, int n2) const {
    if (!has_slice(n1, n2)) throw std::domain_error("ValueTable: slice out of range");
    return slices_[index_[static_cast<std::size_t>(n1) * (N_ + 1) + n2]];
}

double ValueTable::interp(const BanditState& s, int which) const {
    const ValueSlice& sl = slice(s.n1, s.n2);
    const std::vector<double>& v = which == 0 ? sl.r : (which == 1 ? sl.r1 : sl.r2);
    const AxisPos p1 = locate(sl.ax1, s.X1);
    const AxisPos p2 = locate(sl.ax2, s.X2);
    const int i1 = p1.i0 + (sl.ax1.count > 1 ? 1 : 0);
    const int j1 = p2.i0 + (sl.ax2.count > 1 ? 1 : 0);
    const double v00 = v[sl.idx(p1.i0, p2.i0)];
    const double v01 = v[sl.idx(p1.i0, j1)];
    const double v10 = v[sl.idx(i1, p2.i0)];
    const double v11 = v[sl.idx(i1, j1)];
    const double a = p1.frac, b = p2.frac;
    const double out = (1 - a) * ((1 - b) * v00 + b * v01) + a * ((1 - b) * v10 + b * v11);
    return out * sl.scale_factor();
}

double ValueTable::interp_r(const BanditState& s) const { return interp(s, 0); }
double ValueTable::interp_r1(const BanditState& s) const { return interp(s, 1); }
double ValueTable::interp_r2(const BanditState& s) const { return interp(s, 2); }

double ValueTable::max_value() const {
    double m = 0.0;
    for (const auto& sl : slices_) {
        double local = 0.0;
        for (double v : sl.r) local = std::max(local, v);
        m = std::max(m, local * sl.scale_factor());
    }
    return m;
}

void maybe_rescale(ValueSlice& s) {
    double m = 0.0;
    for (double v : s.r) m = std::max(m, std::abs(v));
    for (double v : s.r1) m = std::max(m, std::abs(v));
    for (double v : s.r2) m = std::max(m, std::abs(v));
    if (m == 0.0 || m >= 1e-250) return;
    int e = 0;
    std::frexp(m, &e);
    // Bring the magnitude back near 1; remember the true scale.
    const double f = std::ldexp(1.0, -e);
    for (auto* vec : {&s.r, &s.r1, &s.r2})
        for (double& v : *vec) v *= f;
    s.scale_exp += e;
}

}  // namespace ebandit
