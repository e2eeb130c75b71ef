#include "ebandit/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ebandit {

namespace {

constexpr double kWeightSumTol = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_state(const BanditState& s) {
    if (s.n1 < 0 || s.n2 < 0)
        throw std::domain_error("BanditState: negative pull count");
    if (s.n1 == 0 && s.X1 != 0.0)
        throw std::domain_error("BanditState: X1 != 0 with n1 = 0");
    if (s.n2 == 0 && s.X2 != 0.0)
        throw std::domain_error("BanditState: X2 != 0 with n2 = 0");
}

// Node-dependent part of the log-likelihood: -n log m - X / m. The
// node-independent factor X^{n-1} / (n-1)! is dropped; it cancels in the
// posterior normalization and keeps X = 0 boundary states well defined.
double node_log_term(double X, int n, double m) {
    return -n * std::log(m) - X / m;
}

}  // namespace

DiscretePrior::DiscretePrior(std::vector<PriorNode> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw std::invalid_argument("DiscretePrior: empty support");
    double sum = 0.0;
    for (const auto& n : nodes_) {
        if (!(n.theta.m1 > 0.0) || !(n.theta.m2 > 0.0))
            throw std::invalid_argument("DiscretePrior: means must be positive");
        if (n.weight < 0.0)
            throw std::invalid_argument("DiscretePrior: negative weight");
        sum += n.weight;
    }
    if (std::abs(sum - 1.0) > kWeightSumTol)
        throw std::invalid_argument("DiscretePrior: weights must sum to 1");
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        for (std::size_t j = i + 1; j < nodes_.size(); ++j)
            if (nodes_[i].theta.m1 == nodes_[j].theta.m1 &&
                nodes_[i].theta.m2 == nodes_[j].theta.m2)
                throw std::invalid_argument("DiscretePrior: duplicate support point");
}

double DiscretePrior::max_mean() const {
    double m = 0.0;
    for (const auto& n : nodes_) m = std::max({m, n.theta.m1, n.theta.m2});
    return m;
}

double DiscretePrior::mean_abs_gap() const {
    double g = 0.0;
    for (const auto& n : nodes_) g += n.weight * std::abs(n.theta.m2 - n.theta.m1);
    return g;
}

DiscretePrior DiscretePrior::scaled(double c) const {
    if (!(c > 0.0)) throw std::invalid_argument("DiscretePrior::scaled: c must be positive");
    std::vector<PriorNode> out = nodes_;
    for (auto& n : out) {
        n.theta.m1 *= c;
        n.theta.m2 *= c;
    }
    return DiscretePrior(std::move(out));
}

double exp_density(double x, double m) {
    if (!(m > 0.0)) throw std::domain_error("exp_density: mean must be positive");
    if (x < 0.0) return 0.0;
    return std::exp(-x / m) / m;
}

double log_erlang_density(double X, int n, double m) {
    if (!(m > 0.0)) throw std::domain_error("erlang_density: mean must be positive");
    if (n < 0) throw std::domain_error("erlang_density: negative n");
    if (n == 0) {
        if (X != 0.0) throw std::domain_error("erlang_density: n = 0 requires X = 0");
        return 0.0;
    }
    if (X < 0.0) return kNegInf;
    if (X == 0.0) return n == 1 ? -std::log(m) : kNegInf;
    return (n - 1) * std::log(X) - n * std::log(m) - std::lgamma(n) - X / m;
}

double erlang_density(double X, int n, double m) {
    const double l = log_erlang_density(X, n, m);
    return l == kNegInf ? 0.0 : std::exp(l);
}

double gaussian_density(double x, double m, double D) {
    if (!(D > 0.0)) throw std::domain_error("gaussian_density: variance must be positive");
    const double d = x - m;
    return std::exp(-0.5 * d * d / D) / std::sqrt(2.0 * M_PI * D);
}

double log_marginal(const DiscretePrior& prior, const BanditState& s) {
    check_state(s);
    double best = kNegInf;
    std::vector<double> terms(prior.size(), kNegInf);
    for (std::size_t k = 0; k < prior.size(); ++k) {
        const auto& n = prior.node(k);
        if (n.weight <= 0.0) continue;
        terms[k] = std::log(n.weight) + log_erlang_density(s.X1, s.n1, n.theta.m1) +
                   log_erlang_density(s.X2, s.n2, n.theta.m2);
        best = std::max(best, terms[k]);
    }
    if (best == kNegInf) return kNegInf;
    double sum = 0.0;
    for (double t : terms)
        if (t != kNegInf) sum += std::exp(t - best);
    return best + std::log(sum);
}

double marginal(const DiscretePrior& prior, const BanditState& s) {
    const double l = log_marginal(prior, s);
    return l == kNegInf ? 0.0 : std::exp(l);
}

std::vector<double> posterior_weights(const DiscretePrior& prior, const BanditState& s) {
    check_state(s);
    if (s.X1 < 0.0 || s.X2 < 0.0)
        throw degenerate_evidence_error("posterior: negative cumulative income");
    std::vector<double> lw(prior.size(), kNegInf);
    double best = kNegInf;
    for (std::size_t k = 0; k < prior.size(); ++k) {
        const auto& n = prior.node(k);
        if (n.weight <= 0.0) continue;
        lw[k] = std::log(n.weight) + node_log_term(s.X1, s.n1, n.theta.m1) +
                node_log_term(s.X2, s.n2, n.theta.m2);
        best = std::max(best, lw[k]);
    }
    if (best == kNegInf || !std::isfinite(best))
        throw degenerate_evidence_error("posterior: no support point has finite likelihood");
    double norm = 0.0;
    for (auto& w : lw) {
        w = w == kNegInf ? 0.0 : std::exp(w - best);
        norm += w;
    }
    for (auto& w : lw) w /= norm;
    return lw;
}

DiscretePrior posterior(const DiscretePrior& prior, const BanditState& s) {
    const std::vector<double> w = posterior_weights(prior, s);
    std::vector<PriorNode> out = prior.nodes();
    for (std::size_t k = 0; k < out.size(); ++k) out[k].weight = w[k];
    return DiscretePrior(std::move(out));
}

}  // namespace ebandit
