#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ssp {

/// Cost-to-go estimate over the non-terminal states. The terminal state has
/// value 0 by construction and is never stored.
using ValueVector = std::vector<double>;

/// Slack allowed on probability constraints.
inline constexpr double kProbTol = 1e-12;

/**
 * Finite stochastic shortest path problem.
 *
 * States are indexed 0..n-1 in the C++ API; the absorbing, cost-free
 * terminal state is implicit. For each (state, action) the stored
 * transition row may sum to less than one: the missing mass goes to the
 * terminal state. A discounted problem is represented by scaling its rows by
 * the discount factor (see discounted_to_ssp).
 *
 * Construction only checks shapes; value constraints are reported by
 * validate() so that broken models can still be inspected.
 */
class Mdp {
public:
    Mdp(std::size_t n, std::vector<std::string> actions, std::vector<double> transitions,
        std::vector<double> costs);

    std::size_t num_states() const { return n_; }
    std::size_t num_actions() const { return actions_.size(); }
    const std::vector<std::string>& actions() const { return actions_; }
    const std::string& action_name(std::size_t a) const { return actions_.at(a); }
    std::optional<std::size_t> find_action(const std::string& name) const;

    double prob(std::size_t i, std::size_t a, std::size_t j) const {
        return transitions_[(i * num_actions() + a) * n_ + j];
    }
    double cost(std::size_t i, std::size_t a) const { return costs_[i * num_actions() + a]; }

    /// Transition probabilities to the non-terminal states, indexed by next state.
    std::span<const double> row(std::size_t i, std::size_t a) const {
        return {transitions_.data() + (i * num_actions() + a) * n_, n_};
    }

    double continuation_mass(std::size_t i, std::size_t a) const;
    /// 1 - continuation mass, clamped to [0, 1].
    double terminal_mass(std::size_t i, std::size_t a) const;

    /// Flat storage, layout [state][action][next_state].
    const std::vector<double>& transitions() const { return transitions_; }
    /// Flat storage, layout [state][action].
    const std::vector<double>& costs() const { return costs_; }

    bool operator==(const Mdp&) const = default;

private:
    std::size_t n_;
    std::vector<std::string> actions_;
    std::vector<double> transitions_;
    std::vector<double> costs_;
};

/// Deterministic stationary policy: one action index per state.
struct Policy {
    std::vector<std::size_t> choice;

    std::size_t size() const { return choice.size(); }
    std::size_t operator[](std::size_t i) const { return choice[i]; }
    auto operator<=>(const Policy&) const = default;
};

/// Position of the policy in enumerate_policies order (state 0 is the most
/// significant digit, base = number of actions).
std::size_t policy_index(const Policy& mu, std::size_t num_actions);
Policy policy_from_index(std::size_t index, std::size_t num_states, std::size_t num_actions);

struct Violation {
    std::size_t state = 0;                  // 0-based
    std::optional<std::size_t> action;
    std::optional<std::size_t> next_state;  // 0-based
    std::string description;

    /// "(i,a)" or "(i,a,j)" with 1-based states and the action name.
    std::string location(const Mdp& mdp) const;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
};

ValidationReport validate(const Mdp& mdp);

/// Folds a discount factor into the transitions: every continuation
/// probability is multiplied by alpha, the rest goes to the terminal state.
/// Requires stochastic rows (sum 1). Throws DomainError otherwise.
Mdp discounted_to_ssp(const Mdp& mdp, double alpha);

inline constexpr std::size_t kDefaultPolicyCap = 1'000'000;

/// Number of deterministic policies, m^n. Throws SizeError above cap.
std::size_t policy_count(const Mdp& mdp, std::size_t cap = kDefaultPolicyCap);

/// All m^n policies, lexicographic by (state, action index).
std::vector<Policy> enumerate_policies(const Mdp& mdp, std::size_t cap = kDefaultPolicyCap);

/// Two states, actions {l, r}: l moves to state 1 (index 0), r to state 2
/// (index 1). Staying costs 1, moving costs 0. alpha in (0, 1] is folded
/// into the transitions.
Mdp two_state_example(double alpha);

/// One state, actions {exit, loop}: exit terminates, loop stays put; both
/// cost 1. Improper policies exist, but each has infinite cost.
Mdp loop_or_exit_example();

/// Names of the four policies on the two-state
/// fixture: l = (l,l), r = (r,r), g = (r,l), w = (l,r).
std::optional<Policy> two_state_policy(const std::string& name);
/// Inverse of two_state_policy; empty if mdp is not shaped like the fixture.
std::optional<std::string> two_state_policy_name(const Mdp& mdp, const Policy& mu);

/// Random test instance. Deterministic in its arguments. With
/// force_all_proper every (state, action) keeps at least min_terminal_mass
/// on the terminal state, which makes every policy proper. Otherwise rows
/// are sparse and often have no terminal mass, so improper policies occur.
/// Costs are uniform on [0, 1].
Mdp random_ssp(std::size_t n, std::size_t m, std::uint64_t seed, bool force_all_proper,
               double min_terminal_mass);

} // namespace ssp
