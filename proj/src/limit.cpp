#include "ebandit/limit.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ebandit/threading.hpp"
#include "limit_common.hpp"

namespace ebandit {

namespace {
constexpr double kWeightSumTol = 1e-12;
constexpr double kGridSnapTol = 1e-9;

int time_index(double t, double eps, const char* what) {
    const int i = static_cast<int>(std::lround(t / eps));
    if (std::abs(i * eps - t) > kGridSnapTol)
        throw std::domain_error(std::string(what) + ": value is not on the t grid");
    return i;
}
}  // namespace

ScaledPrior::ScaledPrior(std::vector<ScaledNode> nodes, double m, double D, int N)
    : nodes_(std::move(nodes)), m_(m), D_(D), N_(N) {
    if (nodes_.empty()) throw std::invalid_argument("ScaledPrior: empty support");
    if (!(m_ > 0.0) || !(D_ > 0.0)) throw std::invalid_argument("ScaledPrior: m, D must be positive");
    if (N_ < 1) throw std::invalid_argument("ScaledPrior: N must be >= 1");
    double sum = 0.0;
    for (const auto& n : nodes_) {
        if (n.weight < 0.0) throw std::invalid_argument("ScaledPrior: negative weight");
        sum += n.weight;
    }
    if (std::abs(sum - 1.0) > kWeightSumTol)
        throw std::invalid_argument("ScaledPrior: weights must sum to 1");
}

double ScaledPrior::mean_abs_gap() const {
    double g = 0.0;
    for (const auto& n : nodes_) g += n.weight * std::abs(n.v2 - n.v1);
    return g;
}

DiscretePrior ScaledPrior::to_prior() const {
    const double s = std::sqrt(D_ / N_);
    std::vector<PriorNode> out;
    out.reserve(nodes_.size());
    for (const auto& n : nodes_)
        out.push_back({{m_ + s * n.v1, m_ + s * n.v2}, n.weight});
    return DiscretePrior(std::move(out));
}

ScaledState scale_state(const BanditState& s, const ScaledPrior& sp) {
    const double root = std::sqrt(sp.D() * sp.N());
    return {(s.X1 - s.n1 * sp.m()) / root, static_cast<double>(s.n1) / sp.N(),
            (s.X2 - s.n2 * sp.m()) / root, static_cast<double>(s.n2) / sp.N()};
}

BanditState unscale_state(const ScaledState& s, const ScaledPrior& sp) {
    const double root = std::sqrt(sp.D() * sp.N());
    const int n1 = static_cast<int>(std::lround(s.t1 * sp.N()));
    const int n2 = static_cast<int>(std::lround(s.t2 * sp.N()));
    return {s.x1 * root + n1 * sp.m(), n1, s.x2 * root + n2 * sp.m(), n2};
}

std::pair<double, double> g_limit(double x1, double t1, double x2, double t2,
                                  const ScaledPrior& sp) {
    if (!(t1 > 0.0) || !(t2 > 0.0)) throw std::domain_error("g_limit: t1, t2 must be positive");
    const double norm = 1.0 / (2.0 * M_PI * std::sqrt(t1 * t2));
    double g1 = 0.0, g2 = 0.0;
    for (const auto& n : sp.nodes()) {
        const double d1 = x1 - n.v1 * t1;
        const double d2 = x2 - n.v2 * t2;
        const double dens = norm * std::exp(-0.5 * d1 * d1 / t1 - 0.5 * d2 * d2 / t2);
        g1 += n.weight * std::max(n.v2 - n.v1, 0.0) * dens;
        g2 += n.weight * std::max(n.v1 - n.v2, 0.0) * dens;
    }
    return {g1, g2};
}

double f_kernel(double y, double t, double x_hat, double eps) {
    if (!(eps > 0.0) || !(t > 0.0)) throw std::domain_error("f_kernel: t, eps must be positive");
    const double delta = std::sqrt(eps);
    const double b = 1.0 + delta * x_hat;
    if (!(b > 0.0)) throw std::domain_error("f_kernel: requires 1 + sqrt(eps) x_hat > 0");
    if (y < -1.0) return 0.0;
    const double tn = t / eps;  // t N
    return std::exp(-tn * std::log1p((1.0 + y) / (tn * b))) / b;
}

ScaledAxis make_scaled_axis(double x_span, double h, double eps) {
    if (!(x_span > 0.0) || !(h > 0.0)) throw std::invalid_argument("make_scaled_axis: bad spans");
    const double step = h * std::sqrt(eps);
    const int half = std::max(1, static_cast<int>(std::lround(x_span / step)));
    return {-half * step, step, 2 * half + 1};
}

const ScaledFieldSlice* ScaledField::find(int i1, int i2) const {
    for (const auto& s : slices_)
        if (s.i1 == i1 && s.i2 == i2) return &s;
    return nullptr;
}

namespace limit_detail {

bool physical_node(double x, int t_index, double eps) {
    return std::sqrt(eps) * x + t_index * eps > 0.0;
}

void fill_g(const ScaledPrior& sp, double t1, double t2, const ScaledAxis& ax,
            std::vector<double>& g1, std::vector<double>& g2) {
    const int nx = ax.count;
    const std::size_t n = static_cast<std::size_t>(nx) * nx;
    g1.assign(n, 0.0);
    g2.assign(n, 0.0);
    const double norm = 1.0 / (2.0 * M_PI * std::sqrt(t1 * t2));
    std::vector<double> a(nx), b(nx);
    for (const auto& nd : sp.nodes()) {
        const double c1 = nd.weight * std::max(nd.v2 - nd.v1, 0.0) * norm;
        const double c2 = nd.weight * std::max(nd.v1 - nd.v2, 0.0) * norm;
        if (c1 == 0.0 && c2 == 0.0) continue;
        for (int i = 0; i < nx; ++i) {
            const double d = ax.coord(i) - nd.v1 * t1;
            a[i] = std::exp(-0.5 * d * d / t1);
        }
        for (int j = 0; j < nx; ++j) {
            const double d = ax.coord(j) - nd.v2 * t2;
            b[j] = std::exp(-0.5 * d * d / t2);
        }
        for (int i = 0; i < nx; ++i) {
            const double a1 = c1 * a[i];
            const double a2 = c2 * a[i];
            double* r1 = g1.data() + static_cast<std::size_t>(i) * nx;
            double* r2 = g2.data() + static_cast<std::size_t>(i) * nx;
            for (int j = 0; j < nx; ++j) {
                r1[j] += a1 * b[j];
                r2[j] += a2 * b[j];
            }
        }
    }
}

}  // namespace limit_detail

namespace {

using limit_detail::DiagonalSlice;
using limit_detail::ScaledMarcher;

ScaledField run_marcher(ScaledMarcher& m, const LimitSolveOptions& opts) {
    ScaledField field(m.eps(), m.axis());
    std::set<int> keep;
    for (double e0 : opts.retain_eps0)
        keep.insert(time_index(e0, m.eps(), "retain_eps0"));
    const auto harvest = [&] {
        for (const auto& sl : m.diagonal()) {
            if (opts.retain_all || (sl.i1 == sl.i2 && keep.count(sl.i1)))
                field.add({sl.i1, sl.i2, sl.r, sl.r1, sl.r2});
        }
    };
    harvest();
    while (m.index() > m.min_index()) {
        m.advance();
        harvest();
    }
    field.warnings = m.take_warnings();
    return field;
}

}  // namespace

ScaledField solve_integro_difference_exponential(const ScaledPrior& sp, double eps,
                                                 const LimitSolveOptions& opts) {
    if (opts.x_span < 6.0)
        throw std::invalid_argument("solve_integro_difference: x_span must be >= 6");
    auto m = limit_detail::make_exponential_marcher(sp, eps, opts);
    return run_marcher(*m, opts);
}

ScaledField solve_integro_difference_gaussian(const ScaledPrior& sp, double eps,
                                              const LimitSolveOptions& opts) {
    if (opts.x_span < 6.0)
        throw std::invalid_argument("solve_integro_difference: x_span must be >= 6");
    auto m = limit_detail::make_gaussian_marcher(sp, eps, opts);
    return run_marcher(*m, opts);
}

ScaledField solve_pde(const ScaledPrior& sp, double eps_grid, double x_span, double eps0,
                      const LimitSolveOptions& opts) {
    if (!(eps0 > 0.0) || !(eps0 < 0.5)) throw std::invalid_argument("solve_pde: eps0 in (0, 0.5)");
    auto m = limit_detail::make_pde_marcher(sp, eps_grid, x_span, eps0, opts);
    return run_marcher(*m, opts);
}

double scaled_risk(const ScaledField& field, const ScaledPrior& sp, double eps0) {
    const int i0 = time_index(eps0, field.eps(), "scaled_risk eps0");
    const ScaledFieldSlice* sl = field.find(i0, i0);
    if (sl == nullptr)
        throw std::invalid_argument("scaled_risk: (eps0, eps0) slice was not retained");
    const ScaledAxis& ax = field.axis();
    double integral = 0.0;
    for (int i = 0; i < ax.count; ++i) {
        const double wi = ax.step * ((i == 0 || i + 1 == ax.count) ? 0.5 : 1.0);
        const double* row = sl->r.data() + static_cast<std::size_t>(i) * ax.count;
        double rowsum = 0.0;
        for (int j = 0; j < ax.count; ++j) {
            const double wj = (j == 0 || j + 1 == ax.count) ? 0.5 : 1.0;
            rowsum += wj * row[j];
        }
        integral += wi * rowsum * ax.step;
    }
    return std::sqrt(sp.D() * sp.N()) * (eps0 * sp.mean_abs_gap() + integral);
}

namespace {

// Accumulates the sup distance over nodes where the exponential field is
// defined (physical on both arms), over pairs with both t indices >= i_each.
void accumulate_distance(const std::vector<DiagonalSlice>& da,
                         const std::vector<DiagonalSlice>& db, const ScaledAxis& ax,
                         double eps, int i_each, int threads, FieldDistance& dist) {
    if (da.empty()) return;
    const int nx = ax.count;
    std::vector<FieldDistance> partial(da.size());
    parallel_for(da.size(), threads, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t s = b0; s < b1; ++s) {
            // Match pairs by (i1, i2); the two diagonals may differ in range.
            const DiagonalSlice& a = da[s];
            if (a.i1 < i_each || a.i2 < i_each) continue;
            const DiagonalSlice* b = nullptr;
            for (const auto& cand : db)
                if (cand.i1 == a.i1 && cand.i2 == a.i2) {
                    b = &cand;
                    break;
                }
            if (b == nullptr) continue;
            FieldDistance& d = partial[s];
            for (int i = 0; i < nx; ++i) {
                if (!limit_detail::physical_node(ax.coord(i), a.i1, eps)) continue;
                const double* ra = a.r.data() + static_cast<std::size_t>(i) * nx;
                const double* rb = b->r.data() + static_cast<std::size_t>(i) * nx;
                for (int j = 0; j < nx; ++j) {
                    if (!limit_detail::physical_node(ax.coord(j), a.i2, eps)) continue;
                    d.sup_a = std::max(d.sup_a, ra[j]);
                    d.sup_b = std::max(d.sup_b, rb[j]);
                    d.sup_abs_diff = std::max(d.sup_abs_diff, std::abs(ra[j] - rb[j]));
                }
            }
        }
    });
    for (const auto& p : partial) {
        dist.sup_a = std::max(dist.sup_a, p.sup_a);
        dist.sup_b = std::max(dist.sup_b, p.sup_b);
        dist.sup_abs_diff = std::max(dist.sup_abs_diff, p.sup_abs_diff);
    }
}

}  // namespace

CompareResult compare_exponential_gaussian(const ScaledPrior& sp, double eps,
                                           double t_sum_min, double t_each_min,
                                           double risk_eps0,
                                           const LimitSolveOptions& opts) {
    LimitSolveOptions o = opts;
    o.retain_all = false;
    o.retain_eps0.clear();
    auto ma = limit_detail::make_exponential_marcher(sp, eps, o);
    auto mb = limit_detail::make_gaussian_marcher(sp, eps, o);
    const int i0 = risk_eps0 > 0.0 ? time_index(risk_eps0, eps, "risk_eps0") : 0;
    const int j_region = static_cast<int>(std::ceil(t_sum_min / eps - kGridSnapTol));
    const int i_each = static_cast<int>(std::ceil(t_each_min / eps - kGridSnapTol));

    CompareResult res;
    ScaledField fa(eps, ma->axis()), fb(eps, mb->axis());
    const auto inspect = [&] {
        if (ma->index() >= j_region)
            accumulate_distance(ma->diagonal(), mb->diagonal(), ma->axis(), eps, i_each,
                                opts.threads, res.distance);
        if (i0 > 0 && ma->index() == 2 * i0) {
            for (const auto& sl : ma->diagonal())
                if (sl.i1 == i0 && sl.i2 == i0) fa.add({i0, i0, sl.r, sl.r1, sl.r2});
            for (const auto& sl : mb->diagonal())
                if (sl.i1 == i0 && sl.i2 == i0) fb.add({i0, i0, sl.r, sl.r1, sl.r2});
        }
    };
    inspect();
    while (ma->index() > ma->min_index()) {
        ma->advance();
        mb->advance();
        inspect();
    }
    if (i0 > 0) {
        res.risk_a = scaled_risk(fa, sp, risk_eps0);
        res.risk_b = scaled_risk(fb, sp, risk_eps0);
    }
    return res;
}

CompareResult compare_pde_exponential(const ScaledPrior& sp, double eps, double eps0,
                                      const LimitSolveOptions& opts) {
    LimitSolveOptions o = opts;
    o.retain_all = false;
    o.retain_eps0.clear();
    auto mp = limit_detail::make_pde_marcher(sp, eps, opts.x_span, eps0, o);
    auto me = limit_detail::make_exponential_marcher(sp, eps, o);
    const int i0 = time_index(eps0, eps, "eps0");

    CompareResult res;
    ScaledField fp(eps, mp->axis()), fe(eps, me->axis());
    const auto inspect = [&] {
        accumulate_distance(mp->diagonal(), me->diagonal(), mp->axis(), eps, i0,
                            opts.threads, res.distance);
        if (me->index() == 2 * i0) {
            for (const auto& sl : mp->diagonal())
                if (sl.i1 == i0 && sl.i2 == i0) fp.add({i0, i0, sl.r, sl.r1, sl.r2});
            for (const auto& sl : me->diagonal())
                if (sl.i1 == i0 && sl.i2 == i0) fe.add({i0, i0, sl.r, sl.r1, sl.r2});
        }
    };
    inspect();
    while (me->index() > 2 * i0) {
        me->advance();
        mp->advance();
        inspect();
    }
    res.risk_a = scaled_risk(fp, sp, eps0);
    res.risk_b = scaled_risk(fe, sp, eps0);
    return res;
}

}  // namespace ebandit
