#include "ssp/lemmas.hpp"

#include <sstream>

namespace ssp {

namespace {

// Reports every i with lhs[i] > rhs[i] + tol.
void expect_le(CheckReport& report, const ValueVector& lhs, const ValueVector& rhs, double tol,
               const std::string& what) {
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        if (lhs[i] > rhs[i] + tol) {
            std::ostringstream os;
            os.precision(17);
            os << what << " violated at state " << i + 1 << ": " << lhs[i] << " > " << rhs[i];
            report.failures.push_back(os.str());
        }
    }
}

ValueVector shifted(const ValueVector& J, double c, const ValueVector& direction) {
    ValueVector out(J);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * direction[i];
    return out;
}

} // namespace

CheckReport verify_lemma5(const Mdp& mdp, const ValueVector& J, const ContractionCertificate& cert,
                          std::size_t max_k, double tol) {
    const Policy mu = greedy(mdp, J);
    return verify_lemma5(mdp, J, cert, mu, policy_value_exact(mdp, mu), max_k, tol);
}

CheckReport verify_lemma5(const Mdp& mdp, const ValueVector& J, const ContractionCertificate& cert,
                          const Policy& mu, const ValueVector& j_mu, std::size_t max_k,
                          double tol) {
    CheckReport report;
    const std::size_t n = J.size();
    const Residual res = bellman_residual(mdp, J);
    const double w = weighted_max_norm(res.lambda, cert.theta);
    const double scale = w / (1.0 - cert.beta);

    const ValueVector bound12 = shifted(J, scale, cert.theta);
    ValueVector tj(n);
    for (std::size_t i = 0; i < n; ++i) tj[i] = J[i] + res.c[i];
    const ValueVector bound3 = shifted(tj, cert.beta * scale, cert.theta);

    ValueVector iterate = J;
    for (std::size_t k = 1; k <= max_k; ++k) {
        iterate = apply_T_mu(mdp, iterate, mu);
        expect_le(report, iterate, bound12, tol, "item (1), k=" + std::to_string(k));
    }
    expect_le(report, j_mu, bound12, tol, "item (2)");
    expect_le(report, j_mu, bound3, tol, "item (3)");
    return report;
}

CheckReport verify_shift_lemma(const Mdp& mdp, const ValueVector& J, double c,
                               const ContractionCertificate& cert, double tol) {
    CheckReport report;
    const std::size_t n = J.size();
    const Policy mu = greedy(mdp, J);
    const ValueVector unit(n, 1.0);

    const ValueVector tj = apply_T(mdp, J);
    const ValueVector tmuj = apply_T_mu(mdp, J, mu);

    const ValueVector j_theta = shifted(J, c, cert.theta);
    const ValueVector j_unit = shifted(J, c, unit);

    struct Case {
        ValueVector lhs;
        ValueVector rhs;
        const char* name;
    };
    const Case cases[] = {
        {apply_T(mdp, j_theta), shifted(tj, cert.beta * c, cert.theta), "T weighted shift"},
        {apply_T_mu(mdp, j_theta, mu), shifted(tmuj, cert.beta * c, cert.theta),
         "T_mu weighted shift"},
        {apply_T(mdp, j_unit), shifted(tj, c, unit), "T unit shift"},
        {apply_T_mu(mdp, j_unit, mu), shifted(tmuj, c, unit), "T_mu unit shift"},
    };
    for (const auto& cs : cases) {
        if (c >= 0.0)
            expect_le(report, cs.lhs, cs.rhs, tol, cs.name);
        else
            expect_le(report, cs.rhs, cs.lhs, tol, std::string(cs.name) + " (reversed)");
    }
    return report;
}

} // namespace ssp
