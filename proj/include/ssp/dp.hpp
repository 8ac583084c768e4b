#pragma once

#include "ssp/mdp.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace ssp {

/// Weight vector theta and modulus beta with
///   sum_j P_ij(a) theta(j) <= beta * theta(i)   for all i, a.
/// T and every T_mu are beta-contractions in the theta-weighted max norm.
struct ContractionCertificate {
    ValueVector theta;
    double beta = 0.0;
};

/// Bellman residual c = TJ - J and its positive part lambda = max(c, 0).
struct Residual {
    ValueVector c;
    ValueVector lambda;
};

struct AssumptionReport {
    bool all_proper = false;
    bool exists_proper = false;
    /// Every improper policy has infinite cost from some state.
    bool improper_infinite_cost = false;
    bool assumption3 = false;
};

/// Q-factor g(i,a) + sum_j P_ij(a) J(j). Every operator below goes through
/// this, so T_mu J and TJ agree bit-for-bit under a greedy mu.
double q_value(const Mdp& mdp, const ValueVector& J, std::size_t i, std::size_t a);

ValueVector apply_T_mu(const Mdp& mdp, const ValueVector& J, const Policy& mu);
ValueVector apply_T(const Mdp& mdp, const ValueVector& J);

/// Greedy policy for J; ties go to the smallest action index.
Policy greedy(const Mdp& mdp, const ValueVector& J);

/// TJ and the greedy policy in a single sweep.
std::pair<ValueVector, Policy> bellman_backup(const Mdp& mdp, const ValueVector& J);

/// Absorption with probability one from every start state, i.e. the terminal
/// state is reachable from everywhere along positive-probability edges.
bool is_proper(const Mdp& mdp, const Policy& mu);

/// True if some policy is improper. Found without enumerating policies: the
/// largest set of states that can be kept closed (each state has an action
/// with no terminal mass and all successors inside) is non-empty.
bool has_improper_policy(const Mdp& mdp);

/// Solves (I - P_mu) J = g_mu. Throws PropernessError for improper mu.
ValueVector policy_value_exact(const Mdp& mdp, const Policy& mu);

inline constexpr std::size_t kDefaultIterationCap = 1'000'000;

/// Value iteration from J = 0 until ||TJ - J||_inf <= tol.
/// Throws ConvergenceError at the cap.
std::pair<ValueVector, Policy> optimal_value_vi(const Mdp& mdp, double tol,
                                                std::size_t max_iterations = kDefaultIterationCap);

/// Componentwise minimum of J^mu over all proper policies plus a policy that
/// attains it everywhere. Improper policies are skipped only when they are
/// known to have infinite cost (check_assumptions); otherwise AssumptionError.
std::pair<ValueVector, Policy> brute_force_oracle(const Mdp& mdp,
                                                  std::size_t cap = kDefaultPolicyCap);

/// Requires nonnegative costs whenever an improper policy exists
/// (UnsupportedError otherwise).
AssumptionReport check_assumptions(const Mdp& mdp, std::size_t cap = kDefaultPolicyCap);

/// theta = worst-case expected number of steps to termination, i.e. the
/// fixed point of theta = 1 + max_a P(a) theta; beta = max_i (theta_i - 1) / theta_i.
/// Throws AssumptionError if some policy is improper.
ContractionCertificate contraction_certificate(const Mdp& mdp);

/// True if sum_j P_ij(a) theta(j) <= beta theta(i) + slack for all i, a.
bool certificate_holds(const Mdp& mdp, const ContractionCertificate& cert, double slack = 1e-9);

double weighted_max_norm(const ValueVector& J, const ValueVector& theta);
double max_norm(const ValueVector& J);

Residual bellman_residual(const Mdp& mdp, const ValueVector& J);

/// Fixed point of H_eps J = TJ + eps * theta, by iterating H_eps until
/// ||H_eps Z - Z||_theta <= tol.
ValueVector h_eps_fixed_point(const Mdp& mdp, double eps, const ContractionCertificate& cert,
                              double tol, std::size_t max_iterations = kDefaultIterationCap);

} // namespace ssp
