#pragma once

#include "ssp/dp.hpp"

#include <string>
#include <vector>

namespace ssp {

/// Outcome of a falsification check. A failure here means a bug in the
/// operators, not a property of the model.
struct CheckReport {
    std::vector<std::string> failures;

    bool ok() const { return failures.empty(); }
    void merge(const CheckReport& other) {
        failures.insert(failures.end(), other.failures.begin(), other.failures.end());
    }
};

inline constexpr double kLemmaTol = 1e-9;

/// With mu greedy for J, lambda = max(TJ - J, 0) and w = ||lambda||_theta:
///   (1) T_mu^k J <= J  + w theta / (1 - beta)         for k = 1..max_k
///   (2) J^mu     <= J  + w theta / (1 - beta)
///   (3) J^mu     <= TJ + beta w theta / (1 - beta)
/// The exact J^mu may be passed in to avoid re-solving.
CheckReport verify_lemma5(const Mdp& mdp, const ValueVector& J, const ContractionCertificate& cert,
                          std::size_t max_k = 50, double tol = kLemmaTol);
CheckReport verify_lemma5(const Mdp& mdp, const ValueVector& J, const ContractionCertificate& cert,
                          const Policy& mu, const ValueVector& j_mu, std::size_t max_k = 50,
                          double tol = kLemmaTol);

/// Shift inequalities for T and for T_mu with mu = greedy(J):
///   weighted:   T(J + c theta) <= TJ + beta c theta   (c >= 0; reversed for c < 0)
///   unweighted: T(J + c 1)     <= TJ + c 1            (c >= 0; reversed for c < 0)
CheckReport verify_shift_lemma(const Mdp& mdp, const ValueVector& J, double c,
                               const ContractionCertificate& cert, double tol = kLemmaTol);

} // namespace ssp
