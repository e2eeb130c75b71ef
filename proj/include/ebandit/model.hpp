#pragma once

#include <stdexcept>
#include <vector>

namespace ebandit {

// One-step expected incomes of the two arms.
struct Theta {
    double m1 = 1.0;
    double m2 = 1.0;
};

struct PriorNode {
    Theta theta;
    double weight = 0.0;
};

// Thrown when an observation history has zero likelihood under every node of
// the prior, so no posterior exists.
class degenerate_evidence_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Finite-support prior over Theta. Weights must be nonnegative and sum to
// one (within 1e-12); support points must be distinct and have positive
// means. Continuous priors enter as quadrature nodes chosen by the caller.
class DiscretePrior {
public:
    explicit DiscretePrior(std::vector<PriorNode> nodes);

    const std::vector<PriorNode>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    const PriorNode& node(std::size_t i) const { return nodes_[i]; }

    // Largest mean appearing on either arm; drives grid truncation.
    double max_mean() const;

    // Mean absolute gap E|m2 - m1| under the prior.
    double mean_abs_gap() const;

    // New prior with every mean multiplied by c > 0.
    DiscretePrior scaled(double c) const;

private:
    std::vector<PriorNode> nodes_;
};

// Observation history: pull counts and cumulative incomes per arm.
struct BanditState {
    double X1 = 0.0;
    int n1 = 0;
    double X2 = 0.0;
    int n2 = 0;
};

// Exponential income density with mean m.
double exp_density(double x, double m);

// Density of the sum of n exponential incomes with mean m (Erlang). The
// empty history is the unit convention: n = 0 requires X = 0 and yields 1.
double erlang_density(double X, int n, double m);
double log_erlang_density(double X, int n, double m);

// Normal density with mean m and variance D.
double gaussian_density(double x, double m, double D);

// Prior-mixture likelihood of the history (finite sum over support).
double marginal(const DiscretePrior& prior, const BanditState& s);
double log_marginal(const DiscretePrior& prior, const BanditState& s);

// Posterior over the same support. Node-independent likelihood factors
// cancel in the normalization, so this is well defined even at histories
// whose marginal underflows (or is exactly zero at an X = 0 boundary);
// degenerate_evidence_error fires only when no node has finite log-weight.
DiscretePrior posterior(const DiscretePrior& prior, const BanditState& s);

// Posterior weights in node order, same limit convention as posterior().
std::vector<double> posterior_weights(const DiscretePrior& prior, const BanditState& s);

}  // namespace ebandit
