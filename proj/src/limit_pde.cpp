#include <atomic>
#include <cmath>

#include "limit_common.hpp"

namespace ebandit::limit_detail {

namespace {

// Explicit scheme for the limiting free-boundary equation, marched over the
// same t1 + t2 diagonals as the recursions: each candidate advances its own
// time fraction by one grid step (sub-stepped when the stability bound
// requires), with upwind drift and central diffusion in its own x variable;
// the pointwise minimum of the two candidates closes the step.
class PdeMarcher : public DiagonalMarcherBase {
public:
    PdeMarcher(const ScaledPrior& sp, double eps_grid, double x_span, double eps0,
               const LimitSolveOptions& opts)
        : DiagonalMarcherBase(sp, eps_grid, make_scaled_axis(x_span, opts.h, eps_grid),
                              floor_index(eps0, eps_grid), opts.threads) {}

    std::vector<std::string> take_warnings() override {
        auto out = DiagonalMarcherBase::take_warnings();
        const int k = max_substeps_.load();
        if (k > 1)
            out.push_back("stability bound reduced the time step (up to " +
                          std::to_string(k) + " substeps per grid step)");
        return out;
    }

private:
    static int floor_index(double eps0, double eps_grid) {
        const int i = static_cast<int>(std::lround(eps0 / eps_grid));
        if (i < 1 || std::abs(i * eps_grid - eps0) > 1e-9)
            throw std::domain_error("solve_pde: eps0 is not on the t grid");
        return i;
    }

    int substeps(double t_dest) const {
        const double dx = ax_.step;
        const double xhat_max = std::max(std::abs(ax_.x_min), ax_.x_max()) / t_dest;
        const double bound = 1.0 / (dx * dx) + xhat_max / dx;
        return std::max(1, static_cast<int>(std::ceil(eps_ * bound / 0.9)));
    }

    void note_substeps(int k) {
        int cur = max_substeps_.load(std::memory_order_relaxed);
        while (k > cur &&
               !max_substeps_.compare_exchange_weak(cur, k, std::memory_order_relaxed)) {
        }
    }

    // Advances `v` backward from t_from to t_from - eps along the candidate's
    // own axis (arm 1 = rows/x1, arm 2 = cols/x2); the other arm's time stays
    // at t_other. g is assembled transposed for arm 2 and read accordingly.
    void evolve(std::vector<double>& v, int arm, double t_from, double t_other,
                std::vector<double>& scratch, std::vector<double>& g) {
        const int nx = ax_.count;
        const double dx = ax_.step;
        const int K = substeps(t_from - eps_);
        note_substeps(K);
        const double dt = eps_ / K;
        const std::size_t nn = static_cast<std::size_t>(nx) * nx;

        const std::size_t nk = sp_.nodes().size();
        std::vector<double> a(nx), gap(nk), bfac(nk * nx);
        for (std::size_t k = 0; k < nk; ++k) {
            const auto& nd = sp_.nodes()[k];
            const double v_other = arm == 1 ? nd.v2 : nd.v1;
            gap[k] =
                nd.weight * std::max(arm == 1 ? nd.v2 - nd.v1 : nd.v1 - nd.v2, 0.0);
            for (int j = 0; j < nx; ++j) {
                const double d = ax_.coord(j) - v_other * t_other;
                bfac[k * nx + j] = std::exp(-0.5 * d * d / t_other);
            }
        }

        const double inv_dx = 1.0 / dx;
        const double inv_dx2 = 1.0 / (dx * dx);
        for (int s = 1; s <= K; ++s) {
            const double tau = t_from - dt * s;
            const double norm = 1.0 / (2.0 * M_PI * std::sqrt(tau * t_other));
            g.assign(nn, 0.0);
            for (std::size_t k = 0; k < nk; ++k) {
                if (gap[k] == 0.0) continue;
                const auto& nd = sp_.nodes()[k];
                const double v_own = arm == 1 ? nd.v1 : nd.v2;
                for (int i = 0; i < nx; ++i) {
                    const double d = ax_.coord(i) - v_own * tau;
                    a[i] = gap[k] * norm * std::exp(-0.5 * d * d / tau);
                }
                const double* bf = bfac.data() + k * nx;
                for (int i = 0; i < nx; ++i) {
                    const double c = a[i];
                    double* row = g.data() + static_cast<std::size_t>(i) * nx;
                    for (int j = 0; j < nx; ++j) row[j] += c * bf[j];
                }
            }

            scratch = v;
            for (int i = 0; i < nx; ++i) {
                for (int j = 0; j < nx; ++j) {
                    const int p = arm == 1 ? i : j;  // index along evolving axis
                    const double xhat = ax_.coord(p) / tau;
                    const std::size_t at = static_cast<std::size_t>(i) * nx + j;
                    const double u = scratch[at];
                    const double up = neighbor(scratch, i, j, arm, +1, u);
                    const double dn = neighbor(scratch, i, j, arm, -1, u);
                    const double drift =
                        xhat > 0.0 ? xhat * (up - u) * inv_dx : xhat * (u - dn) * inv_dx;
                    const double diff = 0.5 * (up - 2.0 * u + dn) * inv_dx2;
                    const std::size_t gat =
                        arm == 1 ? at : static_cast<std::size_t>(j) * nx + i;
                    v[at] = u + dt * (g[gat] + u / tau + drift + diff);
                }
            }
        }
    }

    double neighbor(const std::vector<double>& u, int i, int j, int arm, int dir,
                    double self) const {
        const int nx = ax_.count;
        if (arm == 1) {
            const int ii = i + dir;
            if (ii < 0 || ii >= nx) return self;  // zero-gradient ghost
            return u[static_cast<std::size_t>(ii) * nx + j];
        }
        const int jj = j + dir;
        if (jj < 0 || jj >= nx) return self;
        return u[static_cast<std::size_t>(i) * nx + jj];
    }

    void compute(std::vector<DiagonalSlice>& out,
                 const std::vector<DiagonalSlice>& prev) override {
        const int lo_prev = prev.front().i1;
        parallel_for(out.size(), threads_, [&](std::size_t b0, std::size_t b1) {
            std::vector<double> scratch, g;
            for (std::size_t s = b0; s < b1; ++s) {
                DiagonalSlice& sl = out[s];
                sl.r1 = prev[sl.i1 + 1 - lo_prev].r;
                evolve(sl.r1, 1, (sl.i1 + 1) * eps_, sl.i2 * eps_, scratch, g);
                sl.r2 = prev[sl.i1 - lo_prev].r;
                evolve(sl.r2, 2, (sl.i2 + 1) * eps_, sl.i1 * eps_, scratch, g);
                for (std::size_t a = 0; a < sl.r.size(); ++a)
                    sl.r[a] = std::min(sl.r1[a], sl.r2[a]);
            }
        });
    }

    std::atomic<int> max_substeps_{1};
};

}  // namespace

std::unique_ptr<ScaledMarcher> make_pde_marcher(const ScaledPrior& sp, double eps_grid,
                                                double x_span, double eps0,
                                                const LimitSolveOptions& opts) {
    return std::make_unique<PdeMarcher>(sp, eps_grid, x_span, eps0, opts);
}

}  // namespace ebandit::limit_detail
