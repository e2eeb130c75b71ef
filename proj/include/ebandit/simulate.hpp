#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "ebandit/exact_dp.hpp"
#include "ebandit/model.hpp"
#include "ebandit/rng.hpp"
#include "ebandit/value_table.hpp"

namespace ebandit {

// Decision rule for the simulator. Randomized variants draw from the
// episode's stream; deterministic ones consume nothing.
class Policy {
public:
    static Policy dp(std::shared_ptr<const ValueTable> table, double tie_tol = 1e-12);
    static Policy greedy(DiscretePrior prior);
    static Policy epsilon_greedy(DiscretePrior prior, double explore_prob);
    static Policy forced_start_then_dp(std::shared_ptr<const ValueTable> table, int n0,
                                       double tie_tol = 1e-12);
    static Policy always_arm(int arm);

    PolicyDecision decide(const BanditState& s, CounterRng& rng) const { return fn_(s, rng); }

    // Decision with ties resolved (default: arm 1).
    int decide_arm(const BanditState& s, CounterRng& rng) const;

    // Tie resolution; 1 or 2.
    int tie_break = 1;
    const std::string& name() const { return name_; }

private:
    Policy(std::string name, std::function<PolicyDecision(const BanditState&, CounterRng&)> fn)
        : fn_(std::move(fn)), name_(std::move(name)) {}

    std::function<PolicyDecision(const BanditState&, CounterRng&)> fn_;
    std::string name_;
};

struct RegretEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int replications = 0;
};

// Mean and standard error of N max(m1, m2) - total income over independent
// episodes against a fixed parameter. Bit-reproducible for a given seed,
// independent of thread count.
RegretEstimate simulate_strategy(const Policy& policy, Theta theta, int N,
                                 std::uint64_t seed, int replications, int threads = 0);

// Same, with the parameter redrawn from the prior each episode: an unbiased
// estimate of the policy's Bayes-averaged regret.
RegretEstimate bayes_regret_mc(const Policy& policy, const DiscretePrior& prior, int N,
                               std::uint64_t seed, int replications, int threads = 0);

}  // namespace ebandit
