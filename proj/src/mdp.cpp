#include "ssp/mdp.hpp"

#include "ssp/errors.hpp"
#include "ssp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ssp {

Mdp::Mdp(std::size_t n, std::vector<std::string> actions, std::vector<double> transitions,
         std::vector<double> costs)
    : n_(n), actions_(std::move(actions)), transitions_(std::move(transitions)),
      costs_(std::move(costs)) {
    if (n_ == 0) throw DomainError("Mdp: need at least one non-terminal state");
    if (actions_.empty()) throw DomainError("Mdp: need at least one action");
    const std::size_t m = actions_.size();
    if (transitions_.size() != n_ * m * n_)
        throw DomainError("Mdp: transition tensor has " + std::to_string(transitions_.size()) +
                          " entries, expected " + std::to_string(n_ * m * n_));
    if (costs_.size() != n_ * m)
        throw DomainError("Mdp: cost matrix has " + std::to_string(costs_.size()) +
                          " entries, expected " + std::to_string(n_ * m));
}

std::optional<std::size_t> Mdp::find_action(const std::string& name) const {
    auto it = std::find(actions_.begin(), actions_.end(), name);
    if (it == actions_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - actions_.begin());
}

double Mdp::continuation_mass(std::size_t i, std::size_t a) const {
    double s = 0.0;
    for (double p : row(i, a)) s += p;
    return s;
}

double Mdp::terminal_mass(std::size_t i, std::size_t a) const {
    return std::clamp(1.0 - continuation_mass(i, a), 0.0, 1.0);
}

std::size_t policy_index(const Policy& mu, std::size_t num_actions) {
    std::size_t id = 0;
    for (std::size_t a : mu.choice) id = id * num_actions + a;
    return id;
}

Policy policy_from_index(std::size_t index, std::size_t num_states, std::size_t num_actions) {
    Policy mu{std::vector<std::size_t>(num_states, 0)};
    for (std::size_t i = num_states; i-- > 0;) {
        mu.choice[i] = index % num_actions;
        index /= num_actions;
    }
    return mu;
}

std::string Violation::location(const Mdp& mdp) const {
    std::ostringstream os;
    os << '(' << state + 1;
    if (action) {
        os << ',';
        if (*action < mdp.num_actions())
            os << mdp.action_name(*action);
        else
            os << '#' << *action;
    }
    if (next_state) os << ',' << *next_state + 1;
    os << ')';
    return os.str();
}

ValidationReport validate(const Mdp& mdp) {
    ValidationReport report;
    const std::size_t n = mdp.num_states();
    const std::size_t m = mdp.num_actions();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < m; ++a) {
            if (!std::isfinite(mdp.cost(i, a)))
                report.violations.push_back({i, a, std::nullopt, "stage cost is not finite"});
            bool row_finite = true;
            for (std::size_t j = 0; j < n; ++j) {
                const double p = mdp.prob(i, a, j);
                if (!std::isfinite(p)) {
                    row_finite = false;
                    report.violations.push_back({i, a, j, "probability is not finite"});
                } else if (p < 0.0 || p > 1.0) {
                    std::ostringstream os;
                    os << "probability " << p << " outside [0,1]";
                    report.violations.push_back({i, a, j, os.str()});
                }
            }
            if (!row_finite) continue;
            const double sigma = mdp.continuation_mass(i, a);
            if (sigma > 1.0 + kProbTol) {
                std::ostringstream os;
                os << "row sum " << sigma << " exceeds 1";
                report.violations.push_back({i, a, std::nullopt, os.str()});
            }
        }
    }
    return report;
}

Mdp discounted_to_ssp(const Mdp& mdp, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw DomainError("discounted_to_ssp: alpha must lie in [0,1]");
    if (!validate(mdp).ok()) throw DomainError("discounted_to_ssp: input model is invalid");
    for (std::size_t i = 0; i < mdp.num_states(); ++i)
        for (std::size_t a = 0; a < mdp.num_actions(); ++a)
            if (std::abs(mdp.continuation_mass(i, a) - 1.0) > kProbTol)
                throw DomainError("discounted_to_ssp: rows must be stochastic (sum 1)");

    std::vector<double> scaled = mdp.transitions();
    for (double& p : scaled) p *= alpha;
    return Mdp(mdp.num_states(), mdp.actions(), std::move(scaled), mdp.costs());
}

std::size_t policy_count(const Mdp& mdp, std::size_t cap) {
    const std::size_t m = mdp.num_actions();
    std::size_t count = 1;
    for (std::size_t i = 0; i < mdp.num_states(); ++i) {
        if (count > cap / m)
            throw SizeError("policy set exceeds cap of " + std::to_string(cap));
        count *= m;
    }
    if (count > cap) throw SizeError("policy set exceeds cap of " + std::to_string(cap));
    return count;
}

std::vector<Policy> enumerate_policies(const Mdp& mdp, std::size_t cap) {
    const std::size_t count = policy_count(mdp, cap);
    std::vector<Policy> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k)
        out.push_back(policy_from_index(k, mdp.num_states(), mdp.num_actions()));
    return out;
}

Mdp two_state_example(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw DomainError("two_state_example: alpha must lie in (0,1]");
    // [state][action][next]: l goes to state 1, r goes to state 2.
    std::vector<double> moves = {1.0, 0.0, 0.0, 1.0,   // state 1: l stays, r moves
                                 1.0, 0.0, 0.0, 1.0};  // state 2: l moves, r stays
    std::vector<double> costs = {1.0, 0.0,   // g(1,l)=1, g(1,r)=0
                                 0.0, 1.0};  // g(2,l)=0, g(2,r)=1
    Mdp deterministic(2, {"l", "r"}, std::move(moves), std::move(costs));
    return discounted_to_ssp(deterministic, alpha);
}

Mdp loop_or_exit_example() {
    return Mdp(1, {"exit", "loop"}, {0.0, 1.0}, {1.0, 1.0});
}

std::optional<Policy> two_state_policy(const std::string& name) {
    if (name == "l") return Policy{{0, 0}};
    if (name == "r") return Policy{{1, 1}};
    if (name == "g") return Policy{{1, 0}};
    if (name == "w") return Policy{{0, 1}};
    return std::nullopt;
}

std::optional<std::string> two_state_policy_name(const Mdp& mdp, const Policy& mu) {
    if (mdp.num_states() != 2 || mdp.actions() != std::vector<std::string>{"l", "r"})
        return std::nullopt;
    for (const char* name : {"l", "r", "g", "w"})
        if (*two_state_policy(name) == mu) return std::string(name);
    return std::nullopt;
}

Mdp random_ssp(std::size_t n, std::size_t m, std::uint64_t seed, bool force_all_proper,
               double min_terminal_mass) {
    if (n == 0 || m == 0) throw DomainError("random_ssp: n and m must be positive");
    if (force_all_proper && !(min_terminal_mass > 0.0 && min_terminal_mass < 1.0))
        throw DomainError("random_ssp: min_terminal_mass must lie in (0,1)");

    StreamEngine rng(RngStream{seed, stream_key({0x5EED, n, m, force_all_proper ? 1u : 0u})});
    std::vector<double> transitions(n * m * n, 0.0);
    std::vector<double> costs(n * m, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < m; ++a) {
            double terminal;
            if (force_all_proper) {
                const double u = rng.uniform();
                terminal = min_terminal_mass + (1.0 - min_terminal_mass) * u * u;
            } else {
                terminal = rng.uniform() < 0.5 ? 0.0 : 0.5 * rng.uniform();
            }

            // Sparse support with at least one successor.
            std::vector<double> weight(n, 0.0);
            double total = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (rng.uniform() < 0.6) {
                    weight[j] = -std::log1p(-rng.uniform());  // Exp(1)
                    total += weight[j];
                }
            }
            if (total == 0.0) {
                const std::size_t j = static_cast<std::size_t>(rng.uniform() * n) % n;
                weight[j] = 1.0;
                total = 1.0;
            }
            for (std::size_t j = 0; j < n; ++j)
                transitions[(i * m + a) * n + j] = (1.0 - terminal) * weight[j] / total;
            costs[i * m + a] = rng.uniform();
        }
    }
    std::vector<std::string> names;
    for (std::size_t a = 0; a < m; ++a) names.push_back("a" + std::to_string(a));
    return Mdp(n, std::move(names), std::move(transitions), std::move(costs));
}

} // namespace ssp
