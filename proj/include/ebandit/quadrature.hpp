#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace ebandit {

// 16-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 8> kGl16Nodes = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
inline constexpr std::array<double, 8> kGl16Weights = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};

struct QuadNode {
    double x;
    double w;
};

// Gauss-Legendre nodes of one 16-point panel mapped to [a, b].
void append_gl16_panel(double a, double b, std::vector<QuadNode>& out);

// Composite rule: `panels` equal 16-point panels on [a, b].
std::vector<QuadNode> composite_gl16(double a, double b, int panels);

// Composite rule over explicit panel edges.
std::vector<QuadNode> composite_gl16(const std::vector<double>& edges);

template <typename Fn>
double integrate(const std::vector<QuadNode>& rule, Fn&& f) {
    double sum = 0.0;
    for (const auto& n : rule) sum += n.w * f(n.x);
    return sum;
}

// Adaptive Simpson on [a, b] with absolute tolerance. Used by verification
// code that needs an integrator independent of the fixed-panel rules.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, int max_depth = 48);

}  // namespace ebandit
