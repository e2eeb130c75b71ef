#include "ebandit/unnorm_dp.hpp"

#include <array>
#include <algorithm>
#include <chrono>
#include <cmath>

#include "ebandit/threading.hpp"

namespace ebandit {

namespace {

// The income integral of the unnormalized recursion collapses, per source
// node, to a fixed stencil over the next layer's nodes: with w = X + Y the
// kernel is phi(w) = n X^{n-1} w^{-n}, integrated cell by cell against a
// local cubic reconstruction of the layer (Gauss points per cell, Lagrange
// weights deposited on the four surrounding nodes). The cubic matters: the
// layer carries the likelihood's curvature, and a linear reconstruction
// leaves an O(step^2) bias that dominates the cross-recursion comparison.
// Beyond the axis the layer decays at least like exp(-(w - xmax)/m_max)
// (the widest likelihood component), so the tail contributes roughly the
// boundary value times K(xmax) m_max; a constant extension would make the
// n = 1 tail log-divergent.
struct RowWeights {
    int lo = 0;
    std::vector<double> w;
};

inline double ratio_pow(double x_over_w, int p) {
    return p == 0 ? 1.0 : std::exp(p * std::log(x_over_w));
}

constexpr std::array<double, 5> kGl5X = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                         0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGl5W = {0.2369268850561891, 0.4786286704993665,
                                         0.5688888888888889, 0.4786286704993665,
                                         0.2369268850561891};

// Deposits quad_w times the cubic-interpolation weights of position pos
// (fractional node index) onto the node accumulator.
void deposit_cubic(std::vector<double>& acc, double pos, double quad_w) {
    const int m = static_cast<int>(acc.size());
    if (m < 4) {
        const int c = std::clamp(static_cast<int>(pos), 0, m - 2);
        const double s = std::clamp(pos - c, 0.0, 1.0);
        acc[c] += quad_w * (1.0 - s);
        acc[c + 1] += quad_w * s;
        return;
    }
    int c = std::clamp(static_cast<int>(pos), 0, m - 2);
    double s = pos - c;
    int base = c - 1;
    if (base < 0) {
        base = 0;
        s += static_cast<double>(c - 1 - base);  // s in [-1, 0] relative to node base+1
    }
    if (base > m - 4) {
        s += static_cast<double>(base - (m - 4));
        base = m - 4;
    }
    // Lagrange basis on nodes {0,1,2,3} of the stencil at parameter u = s+1.
    const double u = s + 1.0;
    const double u0 = u, u1 = u - 1.0, u2 = u - 2.0, u3 = u - 3.0;
    acc[base] += quad_w * (-u1 * u2 * u3 / 6.0);
    acc[base + 1] += quad_w * (u0 * u2 * u3 / 2.0);
    acc[base + 2] += quad_w * (-u0 * u1 * u3 / 2.0);
    acc[base + 3] += quad_w * (u0 * u1 * u2 / 6.0);
}

RowWeights kernel_row_weights(double X, int n, const Axis& target, double decay_scale) {
    const int m = target.count;
    const double step = target.step;
    const double xmax = target.upper();
    std::vector<double> acc(m, 0.0);

    const auto phi = [&](double w) {
        return n == 1 ? 1.0 / w : n * ratio_pow(X / w, n - 1) / w;
    };

    const int c0 = std::min(static_cast<int>(X / step), m - 2);
    bool exhausted = false;
    for (int c = c0; c + 1 < m; ++c) {
        const double lo = std::max(X, target.coord(c));
        const double hi = target.coord(c + 1);
        if (hi <= lo) continue;
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        for (int q = 0; q < 5; ++q) {
            const double w = mid + half * kGl5X[q];
            deposit_cubic(acc, w / step, kGl5W[q] * half * phi(w));
        }
        if (n >= 2 && ratio_pow(X / hi, n - 1) < 1e-16) {
            exhausted = true;
            break;
        }
    }
    if (!exhausted) acc[m - 1] += phi(xmax) * decay_scale;

    RowWeights out;
    int lo_i = 0, hi_i = m - 1;
    while (lo_i < hi_i && acc[lo_i] == 0.0) ++lo_i;
    while (hi_i > lo_i && acc[hi_i] == 0.0) --hi_i;
    out.lo = lo_i;
    out.w.assign(acc.begin() + lo_i, acc.begin() + hi_i + 1);
    return out;
}

// First-pull stencil: kernel is identically 1, integrated over the whole
// next axis against the cubic reconstruction (two Gauss points per cell are
// exact for cubics).
RowWeights unit_row_weights(const Axis& target) {
    const int m = target.count;
    std::vector<double> acc(m, 0.0);
    const double g = 0.5 / std::sqrt(3.0);
    for (int c = 0; c + 1 < m; ++c) {
        deposit_cubic(acc, c + 0.5 - g, 0.5 * target.step);
        deposit_cubic(acc, c + 0.5 + g, 0.5 * target.step);
    }
    RowWeights out;
    out.lo = 0;
    out.w = std::move(acc);
    return out;
}

void compute_slice(const DiscretePrior& prior, ValueTable& table, int n1, int n2,
                   int threads) {
    ValueSlice& out = table.slice(n1, n2);
    const ValueSlice& t1 = table.slice(n1 + 1, n2);
    const ValueSlice& t2 = table.slice(n1, n2 + 1);
    const int ni = out.ax1.count;
    const int nj = out.ax2.count;
    const std::size_t K = prior.size();
    const double f1 = t1.scale_factor();
    const double f2 = t2.scale_factor();

    // Separable gap terms.
    std::vector<double> e1(K * ni), e2(K * nj);
    for (std::size_t k = 0; k < K; ++k) {
        const Theta th = prior.node(k).theta;
        for (int i = 0; i < ni; ++i)
            e1[k * ni + i] = erlang_density(out.ax1.coord(i), n1, th.m1);
        for (int j = 0; j < nj; ++j)
            e2[k * nj + j] = erlang_density(out.ax2.coord(j), n2, th.m2);
    }

    // Continuation stencils per source node along each arm's own axis.
    std::vector<RowWeights> w1(ni), w2(nj);
    const double decay_scale = table.grid().m_max;
    if (n1 == 0) {
        w1[0] = unit_row_weights(t1.ax1);
    } else {
        for (int i = 0; i < ni; ++i) {
            const double x = out.ax1.coord(i);
            if (x == 0.0 && n1 >= 2) continue;  // kernel limit 0
            w1[i] = kernel_row_weights(x, n1, t1.ax1, decay_scale);
        }
    }
    if (n2 == 0) {
        w2[0] = unit_row_weights(t2.ax2);
    } else {
        for (int j = 0; j < nj; ++j) {
            const double x = out.ax2.coord(j);
            if (x == 0.0 && n2 >= 2) continue;
            w2[j] = kernel_row_weights(x, n2, t2.ax2, decay_scale);
        }
    }

    parallel_for(ni, threads, [&](std::size_t ibegin, std::size_t iend) {
        std::vector<double> cont1(nj);
        for (std::size_t ii = ibegin; ii < iend; ++ii) {
            const int i = static_cast<int>(ii);
            std::fill(cont1.begin(), cont1.end(), 0.0);
            for (std::size_t o = 0; o < w1[i].w.size(); ++o) {
                const double w = w1[i].w[o] * f1;
                if (w == 0.0) continue;
                const double* src = t1.r.data() + t1.idx(w1[i].lo + static_cast<int>(o), 0);
                for (int j = 0; j < nj; ++j) cont1[j] += w * src[j];
            }
            const double* src2 = t2.r.data() + t2.idx(i, 0);
            for (int j = 0; j < nj; ++j) {
                double cont2 = 0.0;
                for (std::size_t o = 0; o < w2[j].w.size(); ++o)
                    cont2 += w2[j].w[o] * src2[w2[j].lo + static_cast<int>(o)];
                cont2 *= f2;

                double g1 = 0.0, g2 = 0.0;
                for (std::size_t k = 0; k < K; ++k) {
                    const auto& nd = prior.node(k);
                    const double lik = nd.weight * e1[k * ni + i] * e2[k * nj + j];
                    g1 += lik * std::max(nd.theta.m2 - nd.theta.m1, 0.0);
                    g2 += lik * std::max(nd.theta.m1 - nd.theta.m2, 0.0);
                }
                const std::size_t at = out.idx(i, j);
                // Cubic reconstruction can undershoot by rounding noise near
                // zero regions; the true values are nonnegative.
                out.r1[at] = std::max(0.0, g1 + cont1[j]);
                out.r2[at] = std::max(0.0, g2 + cont2);
                out.r[at] = std::min(out.r1[at], out.r2[at]);
            }
        }
    });

    maybe_rescale(out);
}

}  // namespace

std::pair<double, double> g_functions(const DiscretePrior& prior, const BanditState& s) {
    double g1 = 0.0, g2 = 0.0;
    for (const auto& nd : prior.nodes()) {
        const double lik = nd.weight * erlang_density(s.X1, s.n1, nd.theta.m1) *
                           erlang_density(s.X2, s.n2, nd.theta.m2);
        g1 += lik * std::max(nd.theta.m2 - nd.theta.m1, 0.0);
        g2 += lik * std::max(nd.theta.m1 - nd.theta.m2, 0.0);
    }
    return {g1, g2};
}

double transition_kernel(double X, int n, double Y) {
    if (n < 1) throw std::domain_error("transition_kernel: n must be >= 1");
    if (X < 0.0 || Y < 0.0) throw std::domain_error("transition_kernel: negative argument");
    if (X == 0.0) {
        if (n == 1)
            throw std::domain_error("transition_kernel: X = 0 with n = 1 is not integrable");
        return 0.0;
    }
    return n * std::exp((n - 1) * std::log(X) - n * std::log(X + Y));
}

UnnormSolveResult solve_unnorm(const DiscretePrior& prior, int N, const GridSpec& grid,
                               const SolveOptions& opts) {
    if (N < 1) throw std::invalid_argument("solve_unnorm: N must be >= 1");
    const auto t0 = std::chrono::steady_clock::now();
    UnnormSolveResult res{ValueTable(N, grid, opts.n1_min, opts.n2_min), 0.0, {}};
    for (int diag = N - 1; diag >= opts.n1_min + opts.n2_min; --diag)
        for (int n1 = opts.n1_min; n1 <= diag - opts.n2_min; ++n1)
            compute_slice(prior, res.table, n1, diag - n1, opts.threads);
    const ValueSlice& root = res.table.slice(opts.n1_min, opts.n2_min);
    res.risk = root.value_r(0, 0);
    res.diag.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

double risk_unnorm_forced_start(const DiscretePrior& prior, int N, int n0,
                                const GridSpec& grid, const SolveOptions& opts,
                                SolveDiagnostics* diag) {
    if (n0 < 1 || 2 * n0 >= N)
        throw std::domain_error("risk_unnorm_forced_start: requires 1 <= n0 and 2*n0 < N");
    SolveOptions sub = opts;
    sub.n1_min = n0;
    sub.n2_min = n0;
    UnnormSolveResult res = solve_unnorm(prior, N, grid, sub);
    if (diag) *diag = res.diag;

    const ValueSlice& sl = res.table.slice(n0, n0);
    double integral = 0.0;
    for (int i = 0; i < sl.ax1.count; ++i) {
        const double wi = sl.ax1.step * ((i == 0 || i + 1 == sl.ax1.count) ? 0.5 : 1.0);
        for (int j = 0; j < sl.ax2.count; ++j) {
            const double wj = sl.ax2.step * ((j == 0 || j + 1 == sl.ax2.count) ? 0.5 : 1.0);
            integral += wi * wj * sl.value_r(i, j);
        }
    }
    return n0 * prior.mean_abs_gap() + integral;
}

EquivalenceReport recursion_equivalence(const DiscretePrior& prior,
                                        const ValueTable& exact_table,
                                        const ValueTable& unnorm_table, double floor) {
    EquivalenceReport rep;
    rep.table_max = unnorm_table.max_value();
    for (const auto& usl : unnorm_table.slices()) {
        if (!exact_table.has_slice(usl.n1, usl.n2)) continue;
        const ValueSlice& esl = exact_table.slice(usl.n1, usl.n2);
        for (int i = 0; i < usl.ax1.count; ++i) {
            for (int j = 0; j < usl.ax2.count; ++j) {
                const double tr = usl.value_r(i, j);
                if (tr <= floor) continue;
                const BanditState s{usl.ax1.coord(i), usl.n1, usl.ax2.coord(j), usl.n2};
                const double prod = esl.value_r(i, j) * marginal(prior, s);
                rep.max_abs_dev = std::max(rep.max_abs_dev, std::abs(tr - prod));
            }
        }
    }
    rep.normalized = rep.table_max > 0.0 ? rep.max_abs_dev / rep.table_max : 0.0;
    return rep;
}

}  // namespace ebandit
