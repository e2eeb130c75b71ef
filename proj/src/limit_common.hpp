#pragma once

#include <cmath>
#include <stdexcept>

#include "ebandit/limit.hpp"
#include "ebandit/threading.hpp"

namespace ebandit::limit_detail {

// Shared backward-diagonal machinery: buffers for the current and previous
// diagonals and the span-truncation diagnostic. Subclasses fill one new
// diagonal from the previous one.
class DiagonalMarcherBase : public ScaledMarcher {
public:
    DiagonalMarcherBase(const ScaledPrior& sp, double eps, ScaledAxis ax, int lo_index,
                        int threads)
        : sp_(sp), eps_(eps), ax_(ax), lo_(lo_index), threads_(threads) {
        steps_ = static_cast<int>(std::lround(1.0 / eps));
        if (steps_ < 2 || std::abs(steps_ * eps - 1.0) > 1e-9)
            throw std::invalid_argument("scaled solver: 1/eps must be an integer >= 2");
        if (2 * lo_ >= steps_)
            throw std::invalid_argument("scaled solver: floor leaves no interior diagonals");
        j_ = steps_;
        cur_ = make_diagonal(j_);
    }

    const ScaledAxis& axis() const override { return ax_; }
    double eps() const override { return eps_; }
    int index() const override { return j_; }
    int min_index() const override { return 2 * lo_; }
    const std::vector<DiagonalSlice>& diagonal() const override { return cur_; }

    void advance() override {
        if (j_ <= min_index())
            throw std::logic_error("scaled solver: advance past final diagonal");
        next_ = make_diagonal(j_ - 1);
        compute(next_, cur_);
        cur_.swap(next_);
        --j_;
        scan_boundary();
    }

    std::vector<std::string> take_warnings() override {
        std::vector<std::string> out;
        if (boundary_flag_)
            out.push_back(
                "boundary values exceed 1% of the interior maximum; x_span may be too "
                "small for this configuration");
        out.insert(out.end(), extra_warnings_.begin(), extra_warnings_.end());
        return out;
    }

protected:
    virtual void compute(std::vector<DiagonalSlice>& out,
                         const std::vector<DiagonalSlice>& prev) = 0;

    std::vector<DiagonalSlice> make_diagonal(int j) const {
        std::vector<DiagonalSlice> d;
        const std::size_t n = static_cast<std::size_t>(ax_.count) * ax_.count;
        for (int i1 = lo_; i1 <= j - lo_; ++i1) {
            DiagonalSlice s;
            s.i1 = i1;
            s.i2 = j - i1;
            s.r.assign(n, 0.0);
            s.r1.assign(n, 0.0);
            s.r2.assign(n, 0.0);
            d.push_back(std::move(s));
        }
        return d;
    }

    void scan_boundary() {
        if (boundary_flag_) return;
        const int nx = ax_.count;
        double interior = 0.0, boundary = 0.0;
        for (const auto& sl : cur_) {
            for (int i = 0; i < nx; ++i) {
                for (int j = 0; j < nx; ++j) {
                    const double v = sl.r[static_cast<std::size_t>(i) * nx + j];
                    if (i == 0 || j == 0 || i + 1 == nx || j + 1 == nx)
                        boundary = std::max(boundary, v);
                    else
                        interior = std::max(interior, v);
                }
            }
        }
        if (interior > 0.0 && boundary > 0.01 * interior) boundary_flag_ = true;
    }

    ScaledPrior sp_;
    double eps_;
    ScaledAxis ax_;
    int lo_;
    int threads_;
    int steps_ = 0;
    int j_ = 0;
    bool boundary_flag_ = false;
    std::vector<std::string> extra_warnings_;
    std::vector<DiagonalSlice> cur_, next_;
};

}  // namespace ebandit::limit_detail
