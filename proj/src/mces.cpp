#include "ssp/mces.hpp"

#include "ssp/errors.hpp"
#include "ssp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#ifndef SSP_VERSION
#define SSP_VERSION "dev"
#endif

namespace ssp {

namespace {

constexpr std::uint64_t kSelectTag = 0x5E1EC7;
constexpr std::uint64_t kEpisodeTag = 0xE9150DE;

bool scalar_schedule(const StepsizeSchedule& s) {
    return s.kind == StepsizeSchedule::Kind::harmonic ||
           s.kind == StepsizeSchedule::Kind::scalar_harmonic;
}

double harmonic_value(const StepsizeSchedule& s, std::size_t t) {
    return s.c / (static_cast<double>(t) + s.offset);
}

// Diagnostics of J_t: greedy policy, ||c_t||, ||lambda_t||, distance to J*.
void fill_diagnostics(TraceRecord& rec, const Mdp& mdp, const RunTrace& trace) {
    auto [tj, mu] = bellman_backup(mdp, rec.J);
    double c_inf = 0.0;
    double lambda_inf = 0.0;
    for (std::size_t i = 0; i < tj.size(); ++i) {
        const double c = tj[i] - rec.J[i];
        c_inf = std::max(c_inf, std::abs(c));
        lambda_inf = std::max(lambda_inf, std::max(c, 0.0));
    }
    rec.policy = policy_index(mu, mdp.num_actions());
    rec.c_inf = c_inf;
    rec.lambda_inf = lambda_inf;
    if (trace.jstar) {
        double d = 0.0;
        for (std::size_t i = 0; i < tj.size(); ++i)
            d = std::max(d, std::abs(rec.J[i] - (*trace.jstar)[i]));
        rec.dist_opt = d;
    }
}

} // namespace

double schedule_value(const StepsizeSchedule& schedule, std::size_t t, std::size_t state,
                      std::size_t visit_count, std::optional<std::span<const double>> p) {
    using Kind = StepsizeSchedule::Kind;
    double gamma = 0.0;
    switch (schedule.kind) {
    case Kind::harmonic:
    case Kind::scalar_harmonic:
        gamma = harmonic_value(schedule, t);
        break;
    case Kind::visit_count:
        if (visit_count == 0) throw ConfigError("schedule_value: visit count must be >= 1");
        gamma = 1.0 / static_cast<double>(visit_count);
        break;
    case Kind::scaled_harmonic:
        if (!p || state >= p->size())
            throw ConfigError("schedule_value: scaled schedule needs selection probabilities");
        if (!((*p)[state] > 0.0))
            throw ConfigError("schedule_value: selection probability must be positive");
        gamma = std::min(1.0, harmonic_value(schedule, t) / (*p)[state]);
        break;
    }
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw ConfigError("schedule_value: stepsize outside (0,1]");
    return gamma;
}

void check_config(const MCESConfig& config, std::size_t n) {
    using SK = SelectionScheme::Kind;
    const auto& sel = config.selection;
    if (sel.kind == SK::categorical) {
        if (sel.p.size() != n)
            throw ConfigError("selection probabilities must have one entry per state");
        double sum = 0.0;
        for (double q : sel.p) {
            if (!(q > 0.0)) throw ConfigError("selection probabilities must be positive");
            sum += q;
        }
        if (std::abs(sum - 1.0) > kProbTol)
            throw ConfigError("selection probabilities must sum to 1");
    }
    const auto& sch = config.schedule;
    if (sch.kind != StepsizeSchedule::Kind::visit_count) {
        if (!(sch.c > 0.0) || !(sch.offset > 0.0))
            throw ConfigError("harmonic schedules need c > 0 and offset > 0");
        if (sch.kind != StepsizeSchedule::Kind::scaled_harmonic && sch.c > sch.offset)
            throw ConfigError("harmonic schedule exceeds 1 at t = 0 (need c <= offset)");
    }

    switch (config.variant) {
    case MCESVariant::sync:
        if (sel.kind != SK::synchronous) throw ConfigError("sync variant needs synchronous selection");
        if (!scalar_schedule(sch)) throw ConfigError("sync variant needs a scalar schedule");
        break;
    case MCESVariant::uniform:
        if (sel.kind != SK::uniform) throw ConfigError("uniform variant needs uniform selection");
        if (!scalar_schedule(sch)) throw ConfigError("uniform variant needs a scalar schedule");
        break;
    case MCESVariant::nonuniform_percomponent:
        if (sel.kind != SK::categorical)
            throw ConfigError("nonuniform variants need categorical selection");
        if (sch.kind != StepsizeSchedule::Kind::visit_count &&
            sch.kind != StepsizeSchedule::Kind::scaled_harmonic)
            throw ConfigError("per-component variant needs visit_count or scaled_harmonic");
        break;
    case MCESVariant::nonuniform_scalar:
        if (sel.kind != SK::categorical)
            throw ConfigError("nonuniform variants need categorical selection");
        if (!scalar_schedule(sch)) throw ConfigError("scalar nonuniform variant needs a scalar schedule");
        break;
    }
    if (config.episodes_per_eval == 0) throw ConfigError("episodes_per_eval must be >= 1");
    if (!config.initial.empty() && config.initial.size() != n)
        throw ConfigError("initial vector has the wrong length");
    for (double v : config.initial)
        if (!std::isfinite(v)) throw ConfigError("initial vector must be finite");
}

std::string build_id() { return std::string("ssp-mces " SSP_VERSION " (") + __VERSION__ + ")"; }

RngStream selection_stream(std::uint64_t seed, std::size_t t) {
    return {seed, stream_key({kSelectTag, t})};
}

RngStream episode_stream(std::uint64_t seed, std::size_t t, std::size_t state) {
    return {seed, stream_key({kEpisodeTag, t, state})};
}

std::size_t draw_state(const SelectionScheme& selection, std::size_t n, std::uint64_t seed,
                       std::size_t t) {
    StreamEngine engine(selection_stream(seed, t));
    const double u = engine.uniform();
    if (selection.kind == SelectionScheme::Kind::uniform)
        return std::min(n - 1, static_cast<std::size_t>(u * static_cast<double>(n)));
    if (selection.kind != SelectionScheme::Kind::categorical)
        throw ConfigError("draw_state: synchronous selection draws nothing");
    double cumulative = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        cumulative += selection.p[i];
        if (u < cumulative) return i;
    }
    return n - 1;
}

RunTrace run_mces(const Mdp& mdp, const MCESConfig& config, const std::optional<ValueVector>& jstar) {
    const std::size_t n = mdp.num_states();
    if (!validate(mdp).ok()) throw ValidationError("run_mces: model fails validation");
    check_config(config, n);
    if (jstar && jstar->size() != n) throw ConfigError("run_mces: J* has the wrong length");

    std::size_t cap = config.episode_cap;
    if (config.eval_mode == EvalMode::monte_carlo && cap == 0) {
        if (has_improper_policy(mdp))
            throw ConfigError("run_mces: episode_cap is required when improper policies exist");
        cap = default_episode_cap(mdp, contraction_certificate(mdp));
    }

    RunTrace trace;
    trace.label = "mces";
    trace.seed = config.seed;
    trace.build_id = build_id();
    trace.num_states = n;
    trace.requested_iterations = config.iterations;
    trace.config = config;
    trace.config->episode_cap = cap;
    trace.jstar = jstar;
    if (jstar) trace.optimal_policy = policy_index(greedy(mdp, *jstar), mdp.num_actions());
    trace.records.reserve(config.iterations + 1);

    std::unordered_map<std::size_t, ValueVector> exact_values;
    auto exact_value = [&](const Policy& mu, std::size_t id) -> const ValueVector& {
        auto it = exact_values.find(id);
        if (it == exact_values.end()) it = exact_values.emplace(id, policy_value_exact(mdp, mu)).first;
        return it->second;
    };

    const std::span<const double> p(config.selection.p);
    std::vector<std::size_t> visits(n, 0);

    TraceRecord rec;
    rec.t = 0;
    rec.J = config.initial.empty() ? ValueVector(n, 0.0) : config.initial;
    fill_diagnostics(rec, mdp, trace);
    trace.records.push_back(rec);

    for (std::size_t t = 0; t < config.iterations; ++t) {
        const TraceRecord& prev = trace.records.back();
        const std::size_t mu_id = *prev.policy;
        const Policy mu = policy_from_index(mu_id, n, mdp.num_actions());

        TraceRecord next;
        next.t = t + 1;
        next.J = prev.J;
        if (config.variant == MCESVariant::sync) {
            next.synchronous = true;
            for (std::size_t i = 0; i < n; ++i) next.selected.push_back(i);
        } else {
            next.selected.push_back(draw_state(config.selection, n, config.seed, t));
        }

        for (std::size_t i : next.selected) {
            double sample;
            if (config.eval_mode == EvalMode::exact) {
                sample = exact_value(mu, mu_id)[i];
            } else {
                sample = mc_policy_estimate(mdp, mu, i, config.episodes_per_eval, cap,
                                            episode_stream(config.seed, t, i))
                             .mean;
            }
            ++visits[i];
            double gamma;
            if (config.variant == MCESVariant::nonuniform_percomponent)
                gamma = schedule_value(config.schedule, t, i, visits[i], p);
            else
                gamma = schedule_value(config.schedule, t, i, 0, std::nullopt);
            next.gamma.push_back(gamma);
            next.samples.push_back(sample);
        }
        // All samples are drawn under mu_t before any component moves.
        for (std::size_t k = 0; k < next.selected.size(); ++k) {
            const std::size_t i = next.selected[k];
            next.J[i] = (1.0 - next.gamma[k]) * prev.J[i] + next.gamma[k] * next.samples[k];
        }

        bool finite = true;
        bool beyond = false;
        for (double v : next.J) {
            if (!std::isfinite(v)) finite = false;
            else if (std::abs(v) > config.divergence_threshold) beyond = true;
        }
        if (!finite) {
            trace.diverged = true;
            break;
        }
        fill_diagnostics(next, mdp, trace);
        trace.records.push_back(std::move(next));
        if (beyond) {
            trace.diverged = true;
            break;
        }
    }
    return trace;
}

ConvergenceSummary convergence_summary(const RunTrace& trace, const ValueVector& jstar, double tol) {
    ConvergenceSummary s;
    s.diverged = trace.diverged;
    if (trace.records.empty()) return s;

    auto dist = [&](const TraceRecord& r) {
        double d = 0.0;
        for (std::size_t i = 0; i < jstar.size(); ++i) d = std::max(d, std::abs(r.J[i] - jstar[i]));
        return d;
    };
    auto optimal = [&](const TraceRecord& r) {
        return !trace.optimal_policy || (r.policy && *r.policy == *trace.optimal_policy);
    };

    const TraceRecord& last = trace.records.back();
    s.final_t = last.t;
    s.final_dist_opt = dist(last);
    s.final_policy = last.policy.value_or(0);
    for (std::size_t k = 1; k < trace.records.size(); ++k)
        if (trace.records[k].policy != trace.records[k - 1].policy) s.last_policy_change = trace.records[k].t;

    for (std::size_t k = trace.records.size(); k-- > 0;) {
        const TraceRecord& r = trace.records[k];
        if (!(dist(r) <= tol) || !optimal(r)) break;
        s.converged_at = r.t;
    }
    s.converged = !trace.diverged && s.final_dist_opt <= tol && optimal(last);
    return s;
}

TraceLemmaReport verify_trace_lemmas(const Mdp& mdp, const RunTrace& trace,
                                     const ContractionCertificate& cert, double tol) {
    TraceLemmaReport report;
    if (trace.records.empty()) return report;
    const std::size_t n = mdp.num_states();
    const ValueVector jstar = trace.jstar ? *trace.jstar : optimal_value_vi(mdp, 1e-12).first;

    std::unordered_map<std::size_t, ValueVector> values;
    for (const TraceRecord& r : trace.records) {
        const Policy mu = greedy(mdp, r.J);
        const std::size_t id = policy_index(mu, mdp.num_actions());
        auto it = values.find(id);
        if (it == values.end()) {
            it = values.emplace(id, policy_value_exact(mdp, mu)).first;
            for (std::size_t i = 0; i < n; ++i) {
                if (it->second[i] < jstar[i] - tol * std::max(1.0, std::abs(jstar[i])))
                    report.dominance.failures.push_back(
                        "J^mu below J* for policy " + std::to_string(id) + " at state " +
                        std::to_string(i + 1));
            }
        }
        auto check = verify_lemma5(mdp, r.J, cert, mu, it->second, 50, tol);
        for (auto& f : check.failures)
            report.lemma5.failures.push_back("t=" + std::to_string(r.t) + ": " + f);
    }

    const std::size_t count = trace.records.size();
    const std::size_t window = std::max<std::size_t>(1, count / 10);
    double head = 0.0;
    double tail = 0.0;
    for (std::size_t k = 0; k < window; ++k) head = std::max(head, trace.records[k].lambda_inf);
    for (std::size_t k = count - window; k < count; ++k) tail = std::max(tail, trace.records[k].lambda_inf);
    if (tail > head + tol)
        report.lambda_decay.failures.push_back("max lambda over final 10% (" + std::to_string(tail) +
                                               ") exceeds max over first 10% (" +
                                               std::to_string(head) + ")");
    return report;
}

} // namespace ssp
