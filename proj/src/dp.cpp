#include "ssp/dp.hpp"

#include "ssp/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace ssp {

namespace {

constexpr double kSolveResidualTol = 1e-9;

bool edge(double p) { return p > 0.0; }
bool terminal_edge(const Mdp& mdp, std::size_t i, std::size_t a) {
    return mdp.terminal_mass(i, a) > kProbTol;
}

// reach[i][j]: j reachable from i in >= 0 steps under mu (non-terminal part).
std::vector<std::vector<char>> reachability(const Mdp& mdp, const Policy& mu) {
    const std::size_t n = mdp.num_states();
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < n; ++s) {
        reach[s][s] = 1;
        stack.assign(1, s);
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            auto row = mdp.row(i, mu[i]);
            for (std::size_t j = 0; j < n; ++j) {
                if (edge(row[j]) && !reach[s][j]) {
                    reach[s][j] = 1;
                    stack.push_back(j);
                }
            }
        }
    }
    return reach;
}

// Plain LU solve of (I - P_mu) x = rhs. Empty if the factorization produced
// non-finite output.
std::optional<ValueVector> lu_solve(const Mdp& mdp, const Policy& mu, const ValueVector& rhs) {
    const auto n = static_cast<Eigen::Index>(mdp.num_states());
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        auto row = mdp.row(static_cast<std::size_t>(i), mu[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < n; ++j) A(i, j) -= row[static_cast<std::size_t>(j)];
        b(i) = rhs[static_cast<std::size_t>(i)];
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    Eigen::VectorXd x = lu.solve(b);
    // One step of iterative refinement.
    x += lu.solve(b - A * x);
    if (!x.allFinite()) return std::nullopt;
    return ValueVector(x.data(), x.data() + n);
}

ValueVector ones(std::size_t n) { return ValueVector(n, 1.0); }

} // namespace

double q_value(const Mdp& mdp, const ValueVector& J, std::size_t i, std::size_t a) {
    double s = mdp.cost(i, a);
    auto row = mdp.row(i, a);
    for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * J[j];
    return s;
}

ValueVector apply_T_mu(const Mdp& mdp, const ValueVector& J, const Policy& mu) {
    ValueVector out(mdp.num_states());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = q_value(mdp, J, i, mu[i]);
    return out;
}

std::pair<ValueVector, Policy> bellman_backup(const Mdp& mdp, const ValueVector& J) {
    const std::size_t n = mdp.num_states();
    ValueVector tj(n);
    Policy mu{std::vector<std::size_t>(n, 0)};
    for (std::size_t i = 0; i < n; ++i) {
        double best = q_value(mdp, J, i, 0);
        std::size_t arg = 0;
        for (std::size_t a = 1; a < mdp.num_actions(); ++a) {
            const double q = q_value(mdp, J, i, a);
            if (q < best) {
                best = q;
                arg = a;
            }
        }
        tj[i] = best;
        mu.choice[i] = arg;
    }
    return {std::move(tj), std::move(mu)};
}

ValueVector apply_T(const Mdp& mdp, const ValueVector& J) { return bellman_backup(mdp, J).first; }

Policy greedy(const Mdp& mdp, const ValueVector& J) { return bellman_backup(mdp, J).second; }

bool is_proper(const Mdp& mdp, const Policy& mu) {
    const std::size_t n = mdp.num_states();
    // Backward search from the terminal state.
    std::vector<std::vector<std::size_t>> preds(n);
    std::vector<char> reaches(n, 0);
    std::vector<std::size_t> frontier;
    for (std::size_t i = 0; i < n; ++i) {
        auto row = mdp.row(i, mu[i]);
        for (std::size_t j = 0; j < n; ++j)
            if (edge(row[j])) preds[j].push_back(i);
        if (terminal_edge(mdp, i, mu[i])) {
            reaches[i] = 1;
            frontier.push_back(i);
        }
    }
    while (!frontier.empty()) {
        const std::size_t j = frontier.back();
        frontier.pop_back();
        for (std::size_t i : preds[j]) {
            if (!reaches[i]) {
                reaches[i] = 1;
                frontier.push_back(i);
            }
        }
    }
    return std::all_of(reaches.begin(), reaches.end(), [](char c) { return c != 0; });
}

bool has_improper_policy(const Mdp& mdp) {
    const std::size_t n = mdp.num_states();
    std::vector<char> keep(n, 1);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!keep[i]) continue;
            bool can_stay = false;
            for (std::size_t a = 0; a < mdp.num_actions() && !can_stay; ++a) {
                if (terminal_edge(mdp, i, a)) continue;
                auto row = mdp.row(i, a);
                bool inside = true;
                for (std::size_t j = 0; j < n && inside; ++j)
                    if (edge(row[j]) && !keep[j]) inside = false;
                can_stay = inside;
            }
            if (!can_stay) {
                keep[i] = 0;
                changed = true;
            }
        }
    }
    return std::any_of(keep.begin(), keep.end(), [](char c) { return c != 0; });
}

ValueVector policy_value_exact(const Mdp& mdp, const Policy& mu) {
    if (!is_proper(mdp, mu)) throw PropernessError("policy_value_exact: policy is improper");
    const std::size_t n = mdp.num_states();
    ValueVector g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = mdp.cost(i, mu[i]);

    auto residual = [&](const ValueVector& J) {
        const ValueVector tj = apply_T_mu(mdp, J, mu);
        double r = 0.0;
        for (std::size_t i = 0; i < n; ++i) r = std::max(r, std::abs(tj[i] - J[i]));
        return r;
    };

    ValueVector J = lu_solve(mdp, mu, g).value_or(ValueVector(n, 0.0));
    if (residual(J) <= kSolveResidualTol) return J;

    // Fall back to fixed-point iteration from the (possibly poor) LU answer.
    for (std::size_t k = 0; k < kDefaultIterationCap; ++k) {
        ValueVector next = apply_T_mu(mdp, J, mu);
        J.swap(next);
        if (residual(J) <= kSolveResidualTol) return J;
    }
    throw ConvergenceError("policy_value_exact: residual stayed above tolerance");
}

std::pair<ValueVector, Policy> optimal_value_vi(const Mdp& mdp, double tol,
                                                std::size_t max_iterations) {
    if (!(tol > 0.0)) throw DomainError("optimal_value_vi: tol must be positive");
    ValueVector J(mdp.num_states(), 0.0);
    for (std::size_t k = 0; k <= max_iterations; ++k) {
        auto [tj, mu] = bellman_backup(mdp, J);
        double r = 0.0;
        for (std::size_t i = 0; i < J.size(); ++i) r = std::max(r, std::abs(tj[i] - J[i]));
        if (!std::isfinite(r)) break;
        if (r <= tol) return {std::move(J), std::move(mu)};
        J = std::move(tj);
    }
    throw ConvergenceError("optimal_value_vi: no convergence within " +
                           std::to_string(max_iterations) + " sweeps");
}

AssumptionReport check_assumptions(const Mdp& mdp, std::size_t cap) {
    AssumptionReport report;
    const std::size_t n = mdp.num_states();
    const bool negative_costs =
        std::any_of(mdp.costs().begin(), mdp.costs().end(), [](double g) { return g < 0.0; });

    report.all_proper = true;
    report.improper_infinite_cost = true;
    for (const Policy& mu : enumerate_policies(mdp, cap)) {
        if (is_proper(mdp, mu)) {
            report.exists_proper = true;
            continue;
        }
        report.all_proper = false;
        if (negative_costs)
            throw UnsupportedError(
                "check_assumptions: divergence of improper policies is not decided for "
                "negative stage costs");
        // A closed class is a set of mutually reachable states with no exit;
        // any positive cost inside it is paid infinitely often.
        const auto reach = reachability(mdp, mu);
        std::vector<char> can_terminate(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (reach[i][j] && terminal_edge(mdp, j, mu[j])) can_terminate[i] = 1;
        bool diverges = false;
        for (std::size_t i = 0; i < n && !diverges; ++i) {
            if (can_terminate[i]) continue;
            bool closed = true;
            for (std::size_t j = 0; j < n && closed; ++j)
                if (reach[i][j] && !reach[j][i]) closed = false;
            if (closed && mdp.cost(i, mu[i]) > 0.0) diverges = true;
        }
        if (!diverges) report.improper_infinite_cost = false;
    }
    report.assumption3 = report.exists_proper && report.improper_infinite_cost;
    return report;
}

std::pair<ValueVector, Policy> brute_force_oracle(const Mdp& mdp, std::size_t cap) {
    const std::size_t n = mdp.num_states();
    const auto policies = enumerate_policies(mdp, cap);

    std::optional<bool> improper_ok;  // filled lazily
    std::vector<std::pair<ValueVector, const Policy*>> values;
    for (const Policy& mu : policies) {
        if (is_proper(mdp, mu)) {
            values.emplace_back(policy_value_exact(mdp, mu), &mu);
            continue;
        }
        if (!improper_ok) improper_ok = check_assumptions(mdp, cap).improper_infinite_cost;
        if (!*improper_ok)
            throw AssumptionError(
                "brute_force_oracle: an improper policy does not have provably infinite cost");
    }
    if (values.empty()) throw AssumptionError("brute_force_oracle: no proper policy");

    ValueVector best(n, std::numeric_limits<double>::infinity());
    for (const auto& [J, mu] : values)
        for (std::size_t i = 0; i < n; ++i) best[i] = std::min(best[i], J[i]);

    for (const auto& [J, mu] : values) {
        bool attains = true;
        for (std::size_t i = 0; i < n && attains; ++i)
            attains = J[i] <= best[i] + 1e-9 * std::max(1.0, std::abs(best[i]));
        if (attains) return {best, *mu};
    }
    throw AssumptionError("brute_force_oracle: no single policy attains the componentwise minimum");
}

ContractionCertificate contraction_certificate(const Mdp& mdp) {
    if (has_improper_policy(mdp))
        throw AssumptionError("contraction_certificate: an improper policy exists");

    const std::size_t n = mdp.num_states();
    const std::size_t m = mdp.num_actions();
    auto expected_next = [&](const ValueVector& theta, std::size_t i, std::size_t a) {
        double s = 0.0;
        auto row = mdp.row(i, a);
        for (std::size_t j = 0; j < n; ++j) s += row[j] * theta[j];
        return s;
    };

    // Policy iteration on the longest expected time to termination.
    Policy mu{std::vector<std::size_t>(n, 0)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 1; a < m; ++a)
            if (mdp.continuation_mass(i, a) > mdp.continuation_mass(i, mu[i])) mu.choice[i] = a;

    ValueVector theta;
    for (std::size_t round = 0;; ++round) {
        auto solved = lu_solve(mdp, mu, ones(n));
        if (!solved) throw AssumptionError("contraction_certificate: singular policy system");
        theta = std::move(*solved);
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            double current = expected_next(theta, i, mu[i]);
            for (std::size_t a = 0; a < m; ++a) {
                const double v = expected_next(theta, i, a);
                if (v > current + 1e-12 * std::max(1.0, theta[i])) {
                    current = v;
                    mu.choice[i] = a;
                    changed = true;
                }
            }
        }
        if (!changed) break;
        if (round > 10'000) throw ConvergenceError("contraction_certificate: policy iteration cap");
    }

    // Polish with value-iteration sweeps on theta = 1 + max_a P(a) theta.
    for (int sweep = 0; sweep < 3; ++sweep) {
        ValueVector next(n);
        for (std::size_t i = 0; i < n; ++i) {
            double best = 0.0;
            for (std::size_t a = 0; a < m; ++a) best = std::max(best, expected_next(theta, i, a));
            next[i] = 1.0 + best;
        }
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            diff = std::max(diff, std::abs(next[i] - theta[i]) / std::max(1.0, theta[i]));
        theta = std::move(next);
        if (diff <= 1e-10) break;
    }

    ContractionCertificate cert;
    cert.beta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(theta[i] >= 1.0) || !std::isfinite(theta[i]))
            throw AssumptionError("contraction_certificate: invalid termination times");
        cert.beta = std::max(cert.beta, (theta[i] - 1.0) / theta[i]);
    }
    cert.theta = std::move(theta);
    if (!(cert.beta < 1.0) || !certificate_holds(mdp, cert))
        throw AssumptionError("contraction_certificate: certificate check failed");
    return cert;
}

bool certificate_holds(const Mdp& mdp, const ContractionCertificate& cert, double slack) {
    const std::size_t n = mdp.num_states();
    if (cert.theta.size() != n || !(cert.beta >= 0.0 && cert.beta < 1.0)) return false;
    for (double t : cert.theta)
        if (!(t > 0.0)) return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
            double s = 0.0;
            auto row = mdp.row(i, a);
            for (std::size_t j = 0; j < n; ++j) s += row[j] * cert.theta[j];
            if (s > cert.beta * cert.theta[i] + slack) return false;
        }
    }
    return true;
}

double weighted_max_norm(const ValueVector& J, const ValueVector& theta) {
    if (J.size() != theta.size()) throw DomainError("weighted_max_norm: size mismatch");
    double r = 0.0;
    for (std::size_t i = 0; i < J.size(); ++i) {
        if (!(theta[i] > 0.0)) throw DomainError("weighted_max_norm: weights must be positive");
        r = std::max(r, std::abs(J[i]) / theta[i]);
    }
    return r;
}

double max_norm(const ValueVector& J) {
    double r = 0.0;
    for (double v : J) r = std::max(r, std::abs(v));
    return r;
}

Residual bellman_residual(const Mdp& mdp, const ValueVector& J) {
    Residual res;
    res.c = apply_T(mdp, J);
    res.lambda.resize(J.size());
    for (std::size_t i = 0; i < J.size(); ++i) {
        res.c[i] -= J[i];
        res.lambda[i] = std::max(res.c[i], 0.0);
    }
    return res;
}

ValueVector h_eps_fixed_point(const Mdp& mdp, double eps, const ContractionCertificate& cert,
                              double tol, std::size_t max_iterations) {
    if (!(eps >= 0.0)) throw DomainError("h_eps_fixed_point: eps must be nonnegative");
    if (!(tol > 0.0)) throw DomainError("h_eps_fixed_point: tol must be positive");
    if (!certificate_holds(mdp, cert))
        throw DomainError("h_eps_fixed_point: certificate does not hold for this model");

    const std::size_t n = mdp.num_states();
    ValueVector Z(n, 0.0);
    for (std::size_t k = 0; k <= max_iterations; ++k) {
        ValueVector hz = apply_T(mdp, Z);
        double r = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            hz[i] += eps * cert.theta[i];
            r = std::max(r, std::abs(hz[i] - Z[i]) / cert.theta[i]);
        }
        if (r <= tol) return Z;
        Z = std::move(hz);
    }
    throw ConvergenceError("h_eps_fixed_point: no convergence within iteration cap");
}

} // namespace ssp
