#pragma once

// Test-only brute-force evaluator for tiny horizons: enumerates the optimal
// strategy tree exactly, integrating each observation with adaptive Simpson
// quadrature. Deliberately independent of the solver code paths: plain
// linear-space likelihoods, no grids, no shared quadrature rules.

#include <cmath>
#include <functional>
#include <vector>

#include "ebandit/model.hpp"
#include "ebandit/quadrature.hpp"

namespace ebandit::oracle {

struct Node {
    double m1, m2, w;
};

inline std::vector<Node> nodes_of(const DiscretePrior& prior) {
    std::vector<Node> out;
    for (const auto& n : prior.nodes()) out.push_back({n.theta.m1, n.theta.m2, n.weight});
    return out;
}

inline double erlang(double X, int n, double m) {
    if (n == 0) return 1.0;
    if (X < 0.0) return 0.0;
    double f = std::exp(-X / m) / m;
    for (int i = 1; i < n; ++i) f *= X / (i * m);
    return f;
}

// Posterior node weights at a history, linear space. The likelihood factors
// common to every node (powers of X and factorials) are dropped so boundary
// histories with X = 0 keep their limiting posterior.
inline std::vector<double> post(const std::vector<Node>& nodes, double X1, int n1,
                                double X2, int n2) {
    std::vector<double> q(nodes.size());
    double norm = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        q[k] = nodes[k].w * std::pow(nodes[k].m1, -n1) * std::exp(-X1 / nodes[k].m1) *
               std::pow(nodes[k].m2, -n2) * std::exp(-X2 / nodes[k].m2);
        norm += q[k];
    }
    for (auto& v : q) v /= norm;
    return q;
}

// Optimal expected remaining regret from a history, exact strategy tree.
inline double value(const std::vector<Node>& nodes, double X1, int n1, double X2, int n2,
                    int N, double quad_tol = 1e-10) {
    if (n1 + n2 >= N) return 0.0;
    const std::vector<double> q = post(nodes, X1, n1, X2, n2);
    double v1 = 0.0, v2 = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const Node& nd = nodes[k];
        v1 += q[k] * std::max(nd.m2 - nd.m1, 0.0);
        v2 += q[k] * std::max(nd.m1 - nd.m2, 0.0);
        if (n1 + n2 + 1 < N) {
            const double y_max1 = -std::log(1e-13) * nd.m1;
            v1 += q[k] * adaptive_simpson(
                             [&](double y) {
                                 return value(nodes, X1 + y, n1 + 1, X2, n2, N, quad_tol) *
                                        std::exp(-y / nd.m1) / nd.m1;
                             },
                             0.0, y_max1, quad_tol);
            const double y_max2 = -std::log(1e-13) * nd.m2;
            v2 += q[k] * adaptive_simpson(
                             [&](double y) {
                                 return value(nodes, X1, n1, X2 + y, n2 + 1, N, quad_tol) *
                                        std::exp(-y / nd.m2) / nd.m2;
                             },
                             0.0, y_max2, quad_tol);
        }
    }
    return std::min(v1, v2);
}

// Branch values (arm 1 first, arm 2 first) from a history.
inline std::pair<double, double> branch_values(const std::vector<Node>& nodes, double X1,
                                               int n1, double X2, int n2, int N,
                                               double quad_tol = 1e-10) {
    const std::vector<double> q = post(nodes, X1, n1, X2, n2);
    double v1 = 0.0, v2 = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const Node& nd = nodes[k];
        v1 += q[k] * std::max(nd.m2 - nd.m1, 0.0);
        v2 += q[k] * std::max(nd.m1 - nd.m2, 0.0);
        if (n1 + n2 + 1 < N) {
            const double y_max1 = -std::log(1e-13) * nd.m1;
            v1 += q[k] * adaptive_simpson(
                             [&](double y) {
                                 return value(nodes, X1 + y, n1 + 1, X2, n2, N, quad_tol) *
                                        std::exp(-y / nd.m1) / nd.m1;
                             },
                             0.0, y_max1, quad_tol);
            const double y_max2 = -std::log(1e-13) * nd.m2;
            v2 += q[k] * adaptive_simpson(
                             [&](double y) {
                                 return value(nodes, X1, n1, X2 + y, n2 + 1, N, quad_tol) *
                                        std::exp(-y / nd.m2) / nd.m2;
                             },
                             0.0, y_max2, quad_tol);
        }
    }
    return {v1, v2};
}

inline double risk(const DiscretePrior& prior, int N, double quad_tol = 1e-10) {
    return value(nodes_of(prior), 0.0, 0, 0.0, 0, N, quad_tol);
}

}  // namespace ebandit::oracle
