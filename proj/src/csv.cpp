#include "ssp/csv.hpp"

#include <charconv>
#include <cmath>

namespace ssp {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
    const std::size_t n = trace.num_states;
    out << "t,sel,gamma";
    for (std::size_t i = 1; i <= n; ++i) out << ",J_" << i;
    out << ",c_inf,lambda_inf,policy,dist_opt\n";
    for (const TraceRecord& r : trace.records) {
        out << r.t << ',';
        if (r.t == 0)
            out << "-1,0";
        else if (r.synchronous || r.selected.size() != 1)
            out << "-2," << format_number(r.gamma.empty() ? 0.0 : r.gamma.front());
        else
            out << r.selected.front() + 1 << ',' << format_number(r.gamma.front());
        for (double v : r.J) out << ',' << format_number(v);
        out << ',' << format_number(r.c_inf) << ',' << format_number(r.lambda_inf) << ',';
        if (r.policy)
            out << *r.policy;
        else
            out << "-1";
        out << ',' << format_number(r.dist_opt) << '\n';
    }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << "seed,final_t,final_dist_opt,final_policy,last_policy_change,converged_at,converged,diverged\n";
    for (const auto& row : rows) {
        const auto& s = row.summary;
        out << row.seed << ',' << s.final_t << ',' << format_number(s.final_dist_opt) << ','
            << s.final_policy << ',' << s.last_policy_change << ',';
        if (s.converged_at) out << *s.converged_at;
        else out << "-1";
        out << ',' << (s.converged ? "true" : "false") << ',' << (s.diverged ? "true" : "false") << '\n';
    }
}

void write_preservation_csv(std::ostream& out, const PreservationReport& report) {
    out << "p_eps,value_gap,policy_preserved\n";
    for (const auto& row : report.rows)
        out << format_number(row.p_eps) << ',' << format_number(row.value_gap) << ','
            << (row.policy_preserved ? "true" : "false") << '\n';
}

} // namespace ssp
