#include "ssp/modification.hpp"

#include "ssp/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ssp {

Mdp epsilon_terminate(const Mdp& mdp, double p_eps) {
    if (!(p_eps > 0.0 && p_eps < 1.0)) throw DomainError("epsilon_terminate: p_eps must lie in (0,1)");
    if (!validate(mdp).ok()) throw ValidationError("epsilon_terminate: model fails validation");
    std::vector<double> scaled = mdp.transitions();
    for (double& p : scaled) p *= (1.0 - p_eps);
    return Mdp(mdp.num_states(), mdp.actions(), std::move(scaled), mdp.costs());
}

PreservationReport preservation_scan(const Mdp& mdp, const std::vector<double>& eps_values,
                                     double target_eps) {
    for (std::size_t k = 0; k < eps_values.size(); ++k) {
        if (!(eps_values[k] > 0.0 && eps_values[k] < 1.0))
            throw DomainError("preservation_scan: p_eps values must lie in (0,1)");
        if (k > 0 && !(eps_values[k] < eps_values[k - 1]))
            throw DomainError("preservation_scan: p_eps values must be strictly descending");
    }
    if (std::any_of(mdp.costs().begin(), mdp.costs().end(), [](double g) { return g < 0.0; }))
        throw UnsupportedError("preservation_scan: stage costs must be nonnegative");
    if (!check_assumptions(mdp).assumption3)
        throw AssumptionError("preservation_scan: needs a proper policy and infinite cost for improper ones");

    PreservationReport report;
    std::tie(report.jstar, report.optimal_policy) = brute_force_oracle(mdp);
    const std::size_t n = mdp.num_states();

    for (double p_eps : eps_values) {
        const Mdp modified = epsilon_terminate(mdp, p_eps);
        PreservationRow row;
        row.p_eps = p_eps;
        std::tie(row.modified_value, row.modified_policy) = optimal_value_vi(modified, 1e-12);
        row.value_gap = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            row.value_gap = std::max(row.value_gap, std::abs(row.modified_value[i] - report.jstar[i]));

        row.policy_preserved = false;
        if (is_proper(mdp, row.modified_policy)) {
            const ValueVector original = policy_value_exact(mdp, row.modified_policy);
            row.policy_preserved = true;
            for (std::size_t i = 0; i < n; ++i)
                if (std::abs(original[i] - report.jstar[i]) > 1e-9) row.policy_preserved = false;
        }
        if (row.policy_preserved && row.value_gap <= target_eps && !report.threshold_estimate)
            report.threshold_estimate = p_eps;
        report.rows.push_back(std::move(row));
    }
    return report;
}

} // namespace ssp
