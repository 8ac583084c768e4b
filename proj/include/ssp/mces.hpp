#pragma once

#include "ssp/dp.hpp"
#include "ssp/lemmas.hpp"
#include "ssp/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ssp {

struct StepsizeSchedule {
    enum class Kind {
        harmonic,         // c / (t + offset)
        visit_count,      // 1 / n_i(t), n_i counted from the start of the run
        scaled_harmonic,  // (c / (t + offset)) / p(i), clamped to 1
        scalar_harmonic,  // c / (t + offset), used by the scalar nonuniform iteration
    };
    Kind kind = Kind::harmonic;
    double c = 1.0;
    double offset = 1.0;

    static StepsizeSchedule harmonic(double c = 1.0, double offset = 1.0) {
        return {Kind::harmonic, c, offset};
    }
    static StepsizeSchedule visit_count() { return {Kind::visit_count, 1.0, 1.0}; }
    static StepsizeSchedule scaled_harmonic(double c = 1.0, double offset = 1.0) {
        return {Kind::scaled_harmonic, c, offset};
    }
    static StepsizeSchedule scalar_harmonic(double c = 1.0, double offset = 1.0) {
        return {Kind::scalar_harmonic, c, offset};
    }
};

/// Stepsize for iteration t (0-based) and state. visit_count must be >= 1
/// for Kind::visit_count; p is required for Kind::scaled_harmonic.
/// Throws ConfigError on missing arguments or an out-of-range result.
double schedule_value(const StepsizeSchedule& schedule, std::size_t t, std::size_t state,
                      std::size_t visit_count, std::optional<std::span<const double>> p);

struct SelectionScheme {
    enum class Kind { synchronous, uniform, categorical };
    Kind kind = Kind::synchronous;
    std::vector<double> p;  // categorical only

    static SelectionScheme synchronous() { return {Kind::synchronous, {}}; }
    static SelectionScheme uniform() { return {Kind::uniform, {}}; }
    static SelectionScheme categorical(std::vector<double> p) {
        return {Kind::categorical, std::move(p)};
    }
};

enum class MCESVariant {
    sync,                     // all states every iteration, scalar stepsize
    uniform,                  // one state drawn uniformly, scalar stepsize
    nonuniform_percomponent,  // one state drawn from p, per-state stepsize
    nonuniform_scalar,        // one state drawn from p, scalar stepsize
};

enum class EvalMode {
    monte_carlo,  // return sampled by simulation
    exact,        // return replaced by J^mu (noise-free)
};

struct MCESConfig {
    MCESVariant variant = MCESVariant::sync;
    StepsizeSchedule schedule = StepsizeSchedule::harmonic();
    SelectionScheme selection = SelectionScheme::synchronous();
    std::size_t iterations = 1000;
    std::size_t episodes_per_eval = 1;
    /// 0: derive from the contraction certificate (needs all policies proper).
    std::size_t episode_cap = 0;
    std::uint64_t seed = 0;
    EvalMode eval_mode = EvalMode::monte_carlo;
    /// Empty: zero vector.
    ValueVector initial;
    /// |J(i)| beyond this ends the run with the divergence flag set.
    double divergence_threshold = 1e12;
};

/// Throws ConfigError if variant, selection and schedule do not fit
/// together or p is not a positive probability vector over n states.
void check_config(const MCESConfig& config, std::size_t n);

struct TraceRecord {
    std::size_t t = 0;
    /// Updated states (0-based); empty for t = 0.
    std::vector<std::size_t> selected;
    /// Stepsize and return sample used for each selected state.
    std::vector<double> gamma;
    std::vector<double> samples;
    /// J_t after the update.
    ValueVector J;
    /// Greedy policy for J_t (enumeration index); empty for traces that
    /// carry no model.
    std::optional<std::size_t> policy;
    double c_inf = std::numeric_limits<double>::quiet_NaN();
    double lambda_inf = std::numeric_limits<double>::quiet_NaN();
    /// ||J_t - J*||_inf when J* is known.
    double dist_opt = std::numeric_limits<double>::quiet_NaN();
    /// ||J_t - J*||_theta when a weight vector is known (stochastic-approximation runs).
    double dist_weighted = std::numeric_limits<double>::quiet_NaN();
    /// Sync rows are written with sel = -2 in CSV output.
    bool synchronous = false;
};

struct RunTrace {
    std::string label;
    std::uint64_t seed = 0;
    std::string build_id;
    std::size_t num_states = 0;
    std::size_t requested_iterations = 0;
    std::optional<MCESConfig> config;
    std::optional<ValueVector> jstar;
    /// greedy(J*) when J* is known.
    std::optional<std::size_t> optimal_policy;
    std::vector<TraceRecord> records;
    bool diverged = false;
};

std::string build_id();

/// Streams used by run_mces; exposed so that other iterations can replay
/// exactly the same randomness.
RngStream selection_stream(std::uint64_t seed, std::size_t t);
RngStream episode_stream(std::uint64_t seed, std::size_t t, std::size_t state);

/// Draws the state updated at iteration t for a single-state scheme.
std::size_t draw_state(const SelectionScheme& selection, std::size_t n, std::uint64_t seed,
                       std::size_t t);

/// Optimistic policy iteration with Monte Carlo (or exact) evaluation:
///   mu_t = greedy(J_t);  J_{t+1}(i) = (1 - gamma) J_t(i) + gamma * sample_i
/// for the states selected by the variant.
RunTrace run_mces(const Mdp& mdp, const MCESConfig& config,
                  const std::optional<ValueVector>& jstar = std::nullopt);

struct ConvergenceSummary {
    double final_dist_opt = 0.0;
    std::size_t final_t = 0;
    std::size_t final_policy = 0;
    /// Last t whose greedy policy differs from that of t - 1 (0 if never).
    std::size_t last_policy_change = 0;
    /// First t from which every record is within tol and optimal-greedy.
    std::optional<std::size_t> converged_at;
    bool converged = false;
    bool diverged = false;
};

ConvergenceSummary convergence_summary(const RunTrace& trace, const ValueVector& jstar, double tol);

struct TraceLemmaReport {
    CheckReport lemma5;     // hard
    CheckReport dominance;  // hard: J^{mu_t} >= J*
    CheckReport lambda_decay;  // soft

    bool hard_ok() const { return lemma5.ok() && dominance.ok(); }
    bool soft_ok() const { return lambda_decay.ok(); }
};

/// Re-checks the residual lemmas along a recorded run: the residual bounds at
/// every iterate, J^{mu_t} >= J*, and that ||lambda_t|| over the last 10% of
/// records does not exceed its maximum over the first 10% (plus tol).
TraceLemmaReport verify_trace_lemmas(const Mdp& mdp, const RunTrace& trace,
                                     const ContractionCertificate& cert, double tol = kLemmaTol);

} // namespace ssp
