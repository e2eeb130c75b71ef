#include <cmath>
#include <limits>

#include "ebandit/quadrature.hpp"
#include "limit_common.hpp"

namespace ebandit::limit_detail {

namespace {

// Weighted stencil over target-axis nodes representing the income integral
// from one source node. Empty = source outside the domain (X < 0).
struct RowWindow {
    int lo = 0;
    std::vector<double> w;
    bool physical() const { return !w.empty(); }
};

// In standardized units the kernel integral becomes
//   integral over u >= 0 of value(x (1 + eps u / t) + delta (u - 1)) (1+u/k)^{-k} du
// with k = t/eps pulls so far; the weight is universal in u and the
// evaluation points are affine in u.
class ExponentialMarcher : public DiagonalMarcherBase {
public:
    ExponentialMarcher(const ScaledPrior& sp, double eps, const LimitSolveOptions& opts)
        : DiagonalMarcherBase(sp, eps, make_scaled_axis(opts.x_span, opts.h, eps), 1,
                              opts.threads) {
        build_windows();
    }

private:
    void build_windows() {
        win_.resize(steps_);
        for (int k = 1; k < steps_; ++k) {
            win_[k].resize(ax_.count);
            parallel_for(ax_.count, threads_, [&](std::size_t b0, std::size_t b1) {
                for (std::size_t i = b0; i < b1; ++i)
                    win_[k][i] = build_window(k, ax_.coord(static_cast<int>(i)));
            });
        }
    }

    RowWindow build_window(int k, double x) const {
        const double delta = std::sqrt(eps_);
        const double t = k * eps_;
        const double b = 1.0 + delta * x / t;
        if (!(b > 0.0)) return {};

        // Stop where evaluations leave the axis (constant extrapolation takes
        // over) or where the remaining kernel mass is negligible.
        const double u_exit = (ax_.x_max() - x + delta) / (delta * b);
        double u_end = u_exit;
        if (k >= 2) {
            const double u_mass = k * std::expm1(34.0 / (k - 1));
            u_end = std::min(u_end, u_mass);
        }

        std::vector<double> edges{0.0};
        for (double e : {2.5, 5.0, 10.0, 15.0, 20.0, 27.5, 35.0, 42.5}) {
            if (e >= u_end) break;
            edges.push_back(e);
        }
        if (u_end > 42.5) {
            double e = 42.5;
            while (e * 1.8 < u_end) {
                e *= 1.8;
                edges.push_back(e);
            }
        }
        edges.push_back(u_end);

        std::vector<double> acc(ax_.count, 0.0);
        for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
            std::vector<QuadNode> panel;
            append_gl16_panel(edges[p], edges[p + 1], panel);
            for (const auto& q : panel) {
                const double w = q.w * std::exp(-k * std::log1p(q.x / k));
                const double ev = x + delta * (b * q.x - 1.0);
                deposit(acc, ev, w);
            }
        }
        // Mass beyond u_end lands past the axis edge; constant extrapolation
        // assigns it to the last node. For k = 1 the kernel tail is only
        // log-integrable, so cap it; the boundary values it multiplies are
        // tiny by the span diagnostic.
        if (u_end >= u_exit - 1e-12) {
            double tail;
            if (k >= 2)
                tail = (static_cast<double>(k) / (k - 1)) *
                       std::exp(-(k - 1) * std::log1p(u_end / k));
            else
                tail = std::log((1.0 + 1e6) / (1.0 + u_end));
            if (tail > 0.0) acc[ax_.count - 1] += tail;
        }

        RowWindow out;
        int lo = 0, hi = ax_.count - 1;
        while (lo < hi && acc[lo] == 0.0) ++lo;
        while (hi > lo && acc[hi] == 0.0) --hi;
        out.lo = lo;
        out.w.assign(acc.begin() + lo, acc.begin() + hi + 1);
        return out;
    }

    void deposit(std::vector<double>& acc, double x, double w) const {
        if (ax_.count < 2 || x <= ax_.x_min) {
            acc[0] += w;
            return;
        }
        const double p = (x - ax_.x_min) / ax_.step;
        if (p >= ax_.count - 1) {
            acc[ax_.count - 1] += w;
            return;
        }
        const int i0 = static_cast<int>(p);
        const double f = p - i0;
        acc[i0] += w * (1.0 - f);
        acc[i0 + 1] += w * f;
    }

    void compute(std::vector<DiagonalSlice>& out,
                 const std::vector<DiagonalSlice>& prev) override {
        const int nx = ax_.count;
        const int lo_prev = prev.front().i1;
        parallel_for(out.size(), threads_, [&](std::size_t b0, std::size_t b1) {
            std::vector<double> g1, g2;
            for (std::size_t s = b0; s < b1; ++s) {
                DiagonalSlice& sl = out[s];
                const DiagonalSlice& t1 = prev[sl.i1 + 1 - lo_prev];  // (i1+1, i2)
                const DiagonalSlice& t2 = prev[sl.i1 - lo_prev];      // (i1, i2+1)
                fill_g(sp_, sl.i1 * eps_, sl.i2 * eps_, ax_, g1, g2);

                for (int i = 0; i < nx; ++i) {
                    const RowWindow& rw = win_[sl.i1][i];
                    double* r1 = sl.r1.data() + static_cast<std::size_t>(i) * nx;
                    if (!rw.physical()) continue;  // row stays zero
                    for (std::size_t o = 0; o < rw.w.size(); ++o) {
                        const double w = rw.w[o];
                        if (w == 0.0) continue;
                        const double* src =
                            t1.r.data() + static_cast<std::size_t>(rw.lo + o) * nx;
                        for (int j = 0; j < nx; ++j) r1[j] += w * src[j];
                    }
                }
                for (int i = 0; i < nx; ++i) {
                    const RowWindow& rw1 = win_[sl.i1][i];
                    if (!rw1.physical()) continue;
                    const double* src = t2.r.data() + static_cast<std::size_t>(i) * nx;
                    const double* gr1 = g1.data() + static_cast<std::size_t>(i) * nx;
                    const double* gr2 = g2.data() + static_cast<std::size_t>(i) * nx;
                    double* r1 = sl.r1.data() + static_cast<std::size_t>(i) * nx;
                    double* r2 = sl.r2.data() + static_cast<std::size_t>(i) * nx;
                    double* r = sl.r.data() + static_cast<std::size_t>(i) * nx;
                    for (int j = 0; j < nx; ++j) {
                        const RowWindow& rw2 = win_[sl.i2][j];
                        if (!rw2.physical()) {
                            r1[j] = r2[j] = r[j] = 0.0;
                            continue;
                        }
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

std::unique_ptr<ScaledMarcher> make_exponential_marcher(const ScaledPrior& sp, double eps,
                                                        const LimitSolveOptions& opts) {
    return std::make_unique<ExponentialMarcher>(sp, eps, opts);
}

}  // namespace ebandit::limit_detail
