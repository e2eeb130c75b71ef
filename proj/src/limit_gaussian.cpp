#include <algorithm>
#include <cmath>

#include "limit_common.hpp"

namespace ebandit::limit_detail {

namespace {

inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }
inline double norm_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

struct RowWindow {
    int lo = 0;
    std::vector<double> w;
};

// One pull of an arm moves the standardized income by a Gaussian step: the
// predictive is N(x (1 + eps/t), eps (t+eps)/t^2) carrying total mass
// 1 + eps/t. Piecewise-linear targets integrate against it in closed form,
// so the stencil below is exact up to the interpolation of the field itself.
class GaussianMarcher : public DiagonalMarcherBase {
public:
    GaussianMarcher(const ScaledPrior& sp, double eps, const LimitSolveOptions& opts)
        : DiagonalMarcherBase(sp, eps, make_scaled_axis(opts.x_span, opts.h, eps), 1,
                              opts.threads) {
        win_.resize(steps_);
        for (int k = 1; k < steps_; ++k) {
            win_[k].resize(ax_.count);
            parallel_for(ax_.count, threads_, [&](std::size_t b0, std::size_t b1) {
                for (std::size_t i = b0; i < b1; ++i)
                    win_[k][i] = build_window(k, ax_.coord(static_cast<int>(i)));
            });
        }
    }

private:
    RowWindow build_window(int k, double x) const {
        const double t = k * eps_;
        const double mass = 1.0 + eps_ / t;
        const double mu = x * (1.0 + eps_ / t);
        const double sigma = std::sqrt(eps_ * (t + eps_) / t);  // delta * std of y

        const int nx = ax_.count;
        int lo = static_cast<int>(std::floor((mu - 8.5 * sigma - ax_.x_min) / ax_.step));
        int hi = static_cast<int>(std::ceil((mu + 8.5 * sigma - ax_.x_min) / ax_.step));
        lo = std::clamp(lo, 0, nx - 1);
        hi = std::clamp(hi, 0, nx - 1);

        RowWindow out;
        out.lo = lo;
        out.w.assign(static_cast<std::size_t>(hi - lo) + 1, 0.0);

        // Tails: constant extrapolation beyond the window edges.
        out.w.front() += norm_cdf((ax_.coord(lo) - mu) / sigma);
        out.w.back() += 1.0 - norm_cdf((ax_.coord(hi) - mu) / sigma);

        for (int c = lo; c < hi; ++c) {
            const double a = ax_.coord(c);
            const double b = ax_.coord(c + 1);
            const double z0 = (a - mu) / sigma;
            const double z1 = (b - mu) / sigma;
            const double p0 = norm_cdf(z1) - norm_cdf(z0);
            const double p1 = mu * p0 + sigma * (norm_pdf(z0) - norm_pdf(z1));
            out.w[c - lo] += (b * p0 - p1) / ax_.step;
            out.w[c + 1 - lo] += (p1 - a * p0) / ax_.step;
        }
        for (double& w : out.w) w *= mass;
        return out;
    }

    void compute(std::vector<DiagonalSlice>& out,
                 const std::vector<DiagonalSlice>& prev) override {
        const int nx = ax_.count;
        const int lo_prev = prev.front().i1;
        parallel_for(out.size(), threads_, [&](std::size_t b0, std::size_t b1) {
            std::vector<double> g1, g2;
            for (std::size_t s = b0; s < b1; ++s) {
                DiagonalSlice& sl = out[s];
                const DiagonalSlice& t1 = prev[sl.i1 + 1 - lo_prev];
                const DiagonalSlice& t2 = prev[sl.i1 - lo_prev];
                fill_g(sp_, sl.i1 * eps_, sl.i2 * eps_, ax_, g1, g2);

                for (int i = 0; i < nx; ++i) {
                    const RowWindow& rw = win_[sl.i1][i];
                    double* r1 = sl.r1.data() + static_cast<std::size_t>(i) * nx;
                    for (std::size_t o = 0; o < rw.w.size(); ++o) {
                        const double w = rw.w[o];
                        const double* src =
                            t1.r.data() + static_cast<std::size_t>(rw.lo + o) * nx;
                        for (int j = 0; j < nx; ++j) r1[j] += w * src[j];
                    }
                }
                for (int i = 0; i < nx; ++i) {
                    const double* src = t2.r.data() + static_cast<std::size_t>(i) * nx;
                    const double* gr1 = g1.data() + static_cast<std::size_t>(i) * nx;
                    const double* gr2 = g2.data() + static_cast<std::size_t>(i) * nx;
                    double* r1 = sl.r1.data() + static_cast<std::size_t>(i) * nx;
                    double* r2 = sl.r2.data() + static_cast<std::size_t>(i) * nx;
                    double* r = sl.r.data() + static_cast<std::size_t>(i) * nx;
                    for (int j = 0; j < nx; ++j) {
                        const RowWindow& rw2 = win_[sl.i2][j];
                        double acc = 0.0;
                        for (std::size_t o = 0; o < rw2.w.size(); ++o)
                            acc += rw2.w[o] * src[rw2.lo + o];
                        const double v1 = r1[j] + eps_ * gr1[j];
                        const double v2 = acc + eps_ * gr2[j];
                        r1[j] = v1;
                        r2[j] = v2;
                        r[j] = std::min(v1, v2);
                    }
                }
            }
        });
    }

    std::vector<std::vector<RowWindow>> win_;
};

}  // namespace

std::unique_ptr<ScaledMarcher> make_gaussian_marcher(const ScaledPrior& sp, double eps,
                                                     const LimitSolveOptions& opts) {
    return std::make_unique<GaussianMarcher>(sp, eps, opts);
}

}  // namespace ebandit::limit_detail
