#pragma once

#include "ssp/mces.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace ssp {

/// What a callback of the stochastic-approximation engine gets to see: the
/// iteration index, the run seed and the current iterate. Callbacks must not
/// keep hidden state; everything random is derived from (seed, t).
struct SAContext {
    std::size_t t = 0;
    std::uint64_t seed = 0;
    const ValueVector& J;
};

using SAMap = std::function<ValueVector(const ValueVector&, std::size_t t)>;
using SAVectorFn = std::function<ValueVector(const SAContext&)>;

/**
 * Problem data for the iteration
 *
 *   J_{t+1}(i) = (1 - gamma_t(i)) J_t(i) + gamma_t(i) (H_t J_t(i) + w_t(i) + u_t(i))
 *
 * with ||H_t J - J*||_theta <= beta ||J - J*||_theta + D. noise and bias may be
 * empty (zero).
 */
struct SAProblem {
    SAMap map;
    ValueVector theta;
    double beta = 0.0;
    double offset = 0.0;  // D
    ValueVector anchor;   // J*
    SAVectorFn noise;
    SAVectorFn bias;
    SAVectorFn stepsizes;
};

/// Spot-checks the pseudo-contraction inequality at `samples` random points
/// (t = 0..samples-1) within `radius` of the anchor. Throws ConfigError on
/// failure or on inconsistent sizes.
void check_sa_problem(const SAProblem& problem, std::uint64_t seed, std::size_t samples = 100,
                      double radius = 0.0);

/// Runs the iteration (after check_sa_problem). Records carry
/// dist_weighted = ||J_t - J*||_theta and dist_opt = ||J_t - J*||_inf.
/// Non-finite iterates end the run with the divergence flag.
RunTrace sa_iterate(const SAProblem& problem, const ValueVector& J0, std::size_t iterations,
                    std::uint64_t seed);

/// Harmonic per-component stepsizes c / (t + offset) for every component.
SAVectorFn harmonic_stepsizes(std::size_t n, double c = 1.0, double offset = 1.0);

/// I.i.d. uniform(-amplitude, amplitude) noise on every component.
SAVectorFn uniform_noise(std::size_t n, double amplitude);

/// Bias u_t(i) uniform in +-theta_t (||J||_inf + 1) with theta_t = c / sqrt(t + 1).
SAVectorFn vanishing_bias(double c);

// Comparison iterates:
//   V_{t+1} = (1 - gamma_t) V_t + gamma_t w_t,  V_{t0} = 0
//   Y_{t+1} = (1 - gamma_t) Y_t + gamma_t G_t,  Y_{t0} = initial
enum class ComparisonKind { V, Y };

struct ComparisonDriver {
    /// V: zero-mean noise sample for iteration t.
    std::function<double(std::size_t t, const RngStream&)> noise;
    /// Y: positive nondecreasing level G_t.
    std::function<double(std::size_t t)> level;
};

struct ComparisonTrace {
    std::size_t t0 = 0;
    std::vector<double> value;  // value[k] is the iterate at t0 + k
    std::vector<double> ratio;  // Y only: |Y_t / G_t|
};

ComparisonTrace comparison_iterate(ComparisonKind kind, const std::function<double(std::size_t)>& schedule,
                                   const ComparisonDriver& driver, std::size_t t0,
                                   std::size_t iterations, std::uint64_t seed, double initial = 0.0);

} // namespace ssp
