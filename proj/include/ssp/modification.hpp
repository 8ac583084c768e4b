#pragma once

#include "ssp/dp.hpp"

#include <optional>
#include <vector>

namespace ssp {

/// Scales every continuation probability by (1 - p_eps); the removed mass
/// goes to the terminal state. Every policy of the result is proper.
/// p_eps must lie in (0, 1).
Mdp epsilon_terminate(const Mdp& mdp, double p_eps);

struct PreservationRow {
    double p_eps = 0.0;
    /// ||J*_modified - J*||_inf
    double value_gap = 0.0;
    /// The modified problem's optimal policy is proper and optimal for the original.
    bool policy_preserved = false;
    ValueVector modified_value;
    Policy modified_policy;
};

struct PreservationReport {
    ValueVector jstar;
    Policy optimal_policy;
    std::vector<PreservationRow> rows;  // descending p_eps
    /// Largest tested p_eps with policy_preserved and value_gap <= target_eps.
    std::optional<double> threshold_estimate;
};

/// For each p_eps in eps_values (strictly descending, inside (0,1)) solves the
/// modified problem and compares with the original optimum (brute force over
/// proper policies). Requires a proper policy and infinite cost for every
/// improper one; AssumptionError otherwise.
PreservationReport preservation_scan(const Mdp& mdp, const std::vector<double>& eps_values,
                                     double target_eps);

} // namespace ssp
