#pragma once

#include "ssp/dp.hpp"
#include "ssp/rng.hpp"

#include <cstddef>

namespace ssp {

struct EpisodeResult {
    double total_cost = 0.0;
    std::size_t steps = 0;
    /// Hit the step cap before absorption; then steps == cap.
    bool truncated = false;
};

/// One trajectory of mu from start (0-based), summing stage costs until the
/// terminal state is entered or cap steps have been taken.
EpisodeResult simulate_episode(const Mdp& mdp, const Policy& mu, std::size_t start, std::size_t cap,
                               const RngStream& rng);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;  // 0 when episodes == 1
    std::size_t truncation_count = 0;
};

/// Sample mean and standard error of the return over independent episodes.
/// Episode k draws from rng.child({k}).
McEstimate mc_policy_estimate(const Mdp& mdp, const Policy& mu, std::size_t start,
                              std::size_t episodes, std::size_t cap, const RngStream& rng);

/// Upper bound on the expected cost lost by truncating after cap steps:
/// beta^cap theta(start) ||g||_inf / (1 - beta).
double truncation_bias_bound(const Mdp& mdp, const ContractionCertificate& cert, std::size_t start,
                             std::size_t cap);

/// Smallest cap with beta^cap theta_max ||g||_inf / (1 - beta) <= tol (at least 1).
std::size_t default_episode_cap(const Mdp& mdp, const ContractionCertificate& cert,
                                double tol = 1e-6);

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace ssp
