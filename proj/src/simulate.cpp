#include "ebandit/simulate.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ebandit/threading.hpp"

namespace ebandit {

Policy Policy::dp(std::shared_ptr<const ValueTable> table, double tie_tol) {
    if (!table) throw std::invalid_argument("Policy::dp: null table");
    return Policy("dp", [table, tie_tol](const BanditState& s, CounterRng&) {
        return extract_policy(*table, s, tie_tol);
    });
}

Policy Policy::greedy(DiscretePrior prior) {
    return Policy("greedy", [prior = std::move(prior)](const BanditState& s, CounterRng&) {
        const std::vector<double> q = posterior_weights(prior, s);
        double e1 = 0.0, e2 = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) {
            e1 += q[k] * prior.node(k).theta.m1;
            e2 += q[k] * prior.node(k).theta.m2;
        }
        if (e1 > e2) return PolicyDecision::Arm1;
        if (e2 > e1) return PolicyDecision::Arm2;
        return PolicyDecision::Tie;
    });
}

Policy Policy::epsilon_greedy(DiscretePrior prior, double explore_prob) {
    if (explore_prob < 0.0 || explore_prob > 1.0)
        throw std::invalid_argument("Policy::epsilon_greedy: probability out of range");
    Policy base = greedy(std::move(prior));
    return Policy("epsilon_greedy",
                  [base = std::move(base), explore_prob](const BanditState& s, CounterRng& rng) {
                      if (rng.next_double() < explore_prob)
                          return rng.next_double() < 0.5 ? PolicyDecision::Arm1
                                                         : PolicyDecision::Arm2;
                      return base.decide(s, rng);
                  });
}

Policy Policy::forced_start_then_dp(std::shared_ptr<const ValueTable> table, int n0,
                                    double tie_tol) {
    if (!table) throw std::invalid_argument("Policy::forced_start_then_dp: null table");
    if (n0 < 1) throw std::invalid_argument("Policy::forced_start_then_dp: n0 must be >= 1");
    return Policy("forced_start_then_dp",
                  [table, n0, tie_tol](const BanditState& s, CounterRng&) {
                      if (s.n1 + s.n2 < 2 * n0)
                          return (s.n1 + s.n2) % 2 == 0 ? PolicyDecision::Arm1
                                                        : PolicyDecision::Arm2;
                      return extract_policy(*table, s, tie_tol);
                  });
}

Policy Policy::always_arm(int arm) {
    if (arm != 1 && arm != 2) throw std::invalid_argument("Policy::always_arm: arm must be 1 or 2");
    return Policy(arm == 1 ? "arm1" : "arm2", [arm](const BanditState&, CounterRng&) {
        return arm == 1 ? PolicyDecision::Arm1 : PolicyDecision::Arm2;
    });
}

int Policy::decide_arm(const BanditState& s, CounterRng& rng) const {
    switch (decide(s, rng)) {
        case PolicyDecision::Arm1:
            return 1;
        case PolicyDecision::Arm2:
            return 2;
        case PolicyDecision::Tie:
            return tie_break;
    }
    return tie_break;
}

namespace {

constexpr int kBlock = 4096;

// Episode regret for one replication; theta is either fixed or drawn from
// the prior as the stream's first variate.
template <typename ThetaFn>
RegretEstimate run_mc(const Policy& policy, ThetaFn&& theta_of, int N, std::uint64_t seed,
                      int replications, int threads) {
    if (replications < 1) throw std::invalid_argument("simulate: replications must be >= 1");
    if (N < 1) throw std::invalid_argument("simulate: N must be >= 1");
    const int blocks = (replications + kBlock - 1) / kBlock;
    std::vector<double> sum(blocks, 0.0), sumsq(blocks, 0.0);

    parallel_for(blocks, threads, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t b = b0; b < b1; ++b) {
            const int lo = static_cast<int>(b) * kBlock;
            const int hi = std::min(replications, lo + kBlock);
            double s = 0.0, s2 = 0.0;
            for (int rep = lo; rep < hi; ++rep) {
                CounterRng rng(seed, static_cast<std::uint64_t>(rep));
                const Theta theta = theta_of(rng);
                BanditState state;
                double income = 0.0;
                for (int n = 0; n < N; ++n) {
                    const int arm = policy.decide_arm(state, rng);
                    const double y = rng.exponential(arm == 1 ? theta.m1 : theta.m2);
                    income += y;
                    if (arm == 1) {
                        state.X1 += y;
                        state.n1 += 1;
                    } else {
                        state.X2 += y;
                        state.n2 += 1;
                    }
                }
                const double regret = N * std::max(theta.m1, theta.m2) - income;
                s += regret;
                s2 += regret * regret;
            }
            sum[b] = s;
            sumsq[b] = s2;
        }
    });

    double total = 0.0, total_sq = 0.0;
    for (int b = 0; b < blocks; ++b) {
        total += sum[b];
        total_sq += sumsq[b];
    }
    RegretEstimate est;
    est.replications = replications;
    est.mean = total / replications;
    if (replications > 1) {
        const double var =
            std::max(0.0, (total_sq - replications * est.mean * est.mean) / (replications - 1));
        est.std_error = std::sqrt(var / replications);
    }
    return est;
}

}  // namespace

RegretEstimate simulate_strategy(const Policy& policy, Theta theta, int N,
                                 std::uint64_t seed, int replications, int threads) {
    return run_mc(
        policy, [theta](CounterRng&) { return theta; }, N, seed, replications, threads);
}

RegretEstimate bayes_regret_mc(const Policy& policy, const DiscretePrior& prior, int N,
                               std::uint64_t seed, int replications, int threads) {
    std::vector<double> weights;
    weights.reserve(prior.size());
    for (const auto& n : prior.nodes()) weights.push_back(n.weight);
    return run_mc(
        policy,
        [&prior, &weights](CounterRng& rng) {
            return prior.node(rng.pick(weights)).theta;
        },
        N, seed, replications, threads);
}

}  // namespace ebandit
