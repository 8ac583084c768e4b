#pragma once

#include "ssp/mces.hpp"
#include "ssp/modification.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace ssp {

/// Shortest decimal that round-trips; "nan" / "inf" / "-inf" otherwise.
std::string format_number(double x);

// Trace CSV: t,sel,gamma,J_1..J_n,c_inf,lambda_inf,policy,dist_opt
// One row per record. sel is the 1-based updated state, -1 at t = 0 and -2
// on synchronous rows; gamma is 0 at t = 0. policy is -1 when unknown.
void write_trace_csv(std::ostream& out, const RunTrace& trace);

struct SummaryRow {
    std::uint64_t seed = 0;
    ConvergenceSummary summary;
};

// seed,final_t,final_dist_opt,final_policy,last_policy_change,converged_at,converged,diverged
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

// p_eps,value_gap,policy_preserved
void write_preservation_csv(std::ostream& out, const PreservationReport& report);

} // namespace ssp
