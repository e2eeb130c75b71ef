#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ebandit/model.hpp"

namespace ebandit {

// Uniform axis over [0, upper] with `count` nodes. An unpulled arm (n = 0)
// collapses to the single node X = 0.
struct Axis {
    double step = 0.0;
    int count = 1;

    double coord(int i) const { return step * i; }
    double upper() const { return step * (count - 1); }
};

// Position of x on an axis for linear interpolation, clamped so that values
// beyond the last node extrapolate as the boundary value.
struct AxisPos {
    int i0 = 0;
    double frac = 0.0;
};

inline AxisPos locate(const Axis& ax, double x) {
    if (ax.count < 2) return {0, 0.0};
    if (x <= 0.0) return {0, 0.0};
    const double p = x / ax.step;
    if (p >= ax.count - 1) return {ax.count - 2, 1.0};
    const int i0 = std::min(static_cast<int>(p), ax.count - 2);
    return {i0, p - i0};
}

// Income-grid layout for the dynamic-programming solvers: the X axis after n
// pulls is truncated at the Erlang mean plus `tail_width` standard
// deviations of the widest prior component. Values beyond are flat, so the
// truncated tail costs far less accuracy than the resolution it frees; 6
// keeps the one-pull truncated mass near 1e-3 while halving the step a 12
// would give.
struct GridSpec {
    int nodes_per_axis = 64;
    double m_max = 1.0;
    double tail_width = 6.0;

    double x_max(int n) const {
        if (n < 1) throw std::domain_error("GridSpec::x_max: n must be >= 1");
        return m_max * (n + tail_width * std::sqrt(static_cast<double>(n)));
    }

    Axis axis(int n) const {
        if (n == 0) return {0.0, 1};
        return {x_max(n) / (nodes_per_axis - 1), nodes_per_axis};
    }

    static GridSpec for_prior(const DiscretePrior& prior, int nodes_per_axis,
                              double tail_width = 6.0) {
        if (nodes_per_axis < 2)
            throw std::invalid_argument("GridSpec: nodes_per_axis must be >= 2");
        return {nodes_per_axis, prior.max_mean(), tail_width};
    }
};

}  // namespace ebandit
