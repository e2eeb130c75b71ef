#include "ebandit/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace ebandit {

void append_gl16_panel(double a, double b, std::vector<QuadNode>& out) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (std::size_t i = 0; i < kGl16Nodes.size(); ++i) {
        const double w = kGl16Weights[i] * half;
        out.push_back({mid - half * kGl16Nodes[i], w});
        out.push_back({mid + half * kGl16Nodes[i], w});
    }
}

std::vector<QuadNode> composite_gl16(double a, double b, int panels) {
    if (panels < 1) throw std::invalid_argument("composite_gl16: panels < 1");
    std::vector<QuadNode> rule;
    rule.reserve(static_cast<std::size_t>(panels) * 16);
    const double step = (b - a) / panels;
    for (int p = 0; p < panels; ++p)
        append_gl16_panel(a + p * step, a + (p + 1) * step, rule);
    return rule;
}

std::vector<QuadNode> composite_gl16(const std::vector<double>& edges) {
    if (edges.size() < 2) throw std::invalid_argument("composite_gl16: need >= 2 edges");
    std::vector<QuadNode> rule;
    rule.reserve((edges.size() - 1) * 16);
    for (std::size_t p = 0; p + 1 < edges.size(); ++p)
        append_gl16_panel(edges[p], edges[p + 1], rule);
    return rule;
}

namespace {

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double b,
                     double fa, double fm, double fb, double whole, double tol,
                     int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, int max_depth) {
    if (!(b > a)) return 0.0;
    // Seed with a fixed partition so narrow features inside a wide interval
    // cannot be skipped by the first coarse samples.
    constexpr int kSeed = 16;
    const double step = (b - a) / kSeed;
    double total = 0.0;
    for (int i = 0; i < kSeed; ++i) {
        const double lo = a + i * step;
        const double hi = i + 1 == kSeed ? b : lo + step;
        const double m = 0.5 * (lo + hi);
        const double fa = f(lo), fm = f(m), fb = f(hi);
        const double whole = simpson(fa, fm, fb, hi - lo);
        total += adaptive_step(f, lo, hi, fa, fm, fb, whole, abs_tol / kSeed, max_depth);
    }
    return total;
}

}  // namespace ebandit
