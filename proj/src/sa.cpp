#include "ssp/sa.hpp"

#include "ssp/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ssp {

namespace {

constexpr std::uint64_t kCheckTag = 0xC4EC;
constexpr std::uint64_t kNoiseTag = 0x9015E;
constexpr std::uint64_t kBiasTag = 0xB1A5;
constexpr std::uint64_t kComparisonTag = 0xC0C0;

double weighted_distance(const ValueVector& a, const ValueVector& b, const ValueVector& theta) {
    double r = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]) / theta[i]);
    return r;
}

ValueVector call_or_zero(const SAVectorFn& fn, const SAContext& ctx, std::size_t n, const char* what) {
    if (!fn) return ValueVector(n, 0.0);
    ValueVector v = fn(ctx);
    if (v.size() != n) throw ConfigError(std::string("sa_iterate: ") + what + " has the wrong length");
    return v;
}

} // namespace

void check_sa_problem(const SAProblem& problem, std::uint64_t seed, std::size_t samples, double radius) {
    const std::size_t n = problem.anchor.size();
    if (n == 0) throw ConfigError("SAProblem: anchor is empty");
    if (problem.theta.size() != n) throw ConfigError("SAProblem: theta has the wrong length");
    for (double t : problem.theta)
        if (!(t > 0.0)) throw ConfigError("SAProblem: theta must be positive");
    if (!(problem.beta >= 0.0 && problem.beta < 1.0)) throw ConfigError("SAProblem: beta must lie in [0,1)");
    if (!(problem.offset >= 0.0)) throw ConfigError("SAProblem: D must be nonnegative");
    if (!problem.map) throw ConfigError("SAProblem: map is missing");
    if (!problem.stepsizes) throw ConfigError("SAProblem: stepsizes are missing");

    if (radius <= 0.0) radius = 10.0 * (weighted_distance(problem.anchor, ValueVector(n, 0.0), problem.theta) + 1.0);
    for (std::size_t k = 0; k < samples; ++k) {
        StreamEngine rng(RngStream{seed, stream_key({kCheckTag, k})});
        ValueVector J(n);
        for (std::size_t i = 0; i < n; ++i)
            J[i] = problem.anchor[i] + problem.theta[i] * rng.uniform(-radius, radius);
        const ValueVector hj = problem.map(J, k);
        if (hj.size() != n) throw ConfigError("SAProblem: map returned the wrong length");
        const double lhs = weighted_distance(hj, problem.anchor, problem.theta);
        const double rhs = problem.beta * weighted_distance(J, problem.anchor, problem.theta) + problem.offset;
        if (lhs > rhs + 1e-9 * std::max(1.0, rhs))
            throw ConfigError("SAProblem: pseudo-contraction inequality fails at a sampled point");
    }
}

RunTrace sa_iterate(const SAProblem& problem, const ValueVector& J0, std::size_t iterations,
                    std::uint64_t seed) {
    check_sa_problem(problem, seed);
    const std::size_t n = problem.anchor.size();
    if (J0.size() != n) throw ConfigError("sa_iterate: J0 has the wrong length");

    RunTrace trace;
    trace.label = "stochastic-approximation";
    trace.seed = seed;
    trace.build_id = build_id();
    trace.num_states = n;
    trace.requested_iterations = iterations;
    trace.jstar = problem.anchor;
    trace.records.reserve(iterations + 1);

    auto finish = [&](TraceRecord& r) {
        r.dist_weighted = weighted_distance(r.J, problem.anchor, problem.theta);
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(r.J[i] - problem.anchor[i]));
        r.dist_opt = d;
    };

    TraceRecord first;
    first.J = J0;
    finish(first);
    trace.records.push_back(std::move(first));

    for (std::size_t t = 0; t < iterations; ++t) {
        const ValueVector& J = trace.records.back().J;
        const SAContext ctx{t, seed, J};
        const ValueVector hj = problem.map(J, t);
        if (hj.size() != n) throw ConfigError("sa_iterate: map returned the wrong length");
        const ValueVector w = call_or_zero(problem.noise, ctx, n, "noise");
        const ValueVector u = call_or_zero(problem.bias, ctx, n, "bias");
        const ValueVector gamma = call_or_zero(problem.stepsizes, ctx, n, "stepsizes");

        TraceRecord next;
        next.t = t + 1;
        next.J.resize(n);
        bool finite = true;
        for (std::size_t i = 0; i < n; ++i) {
            const double target = hj[i] + w[i] + u[i];
            next.J[i] = (1.0 - gamma[i]) * J[i] + gamma[i] * target;
            if (gamma[i] != 0.0) {
                next.selected.push_back(i);
                next.gamma.push_back(gamma[i]);
                next.samples.push_back(target);
            }
            finite = finite && std::isfinite(next.J[i]);
        }
        if (!finite) {
            trace.diverged = true;
            break;
        }
        finish(next);
        trace.records.push_back(std::move(next));
    }
    return trace;
}

SAVectorFn harmonic_stepsizes(std::size_t n, double c, double offset) {
    return [=](const SAContext& ctx) {
        return ValueVector(n, c / (static_cast<double>(ctx.t) + offset));
    };
}

SAVectorFn uniform_noise(std::size_t n, double amplitude) {
    return [=](const SAContext& ctx) {
        StreamEngine rng(RngStream{ctx.seed, stream_key({kNoiseTag, ctx.t})});
        ValueVector w(n);
        for (auto& x : w) x = rng.uniform(-amplitude, amplitude);
        return w;
    };
}

SAVectorFn vanishing_bias(double c) {
    return [=](const SAContext& ctx) {
        StreamEngine rng(RngStream{ctx.seed, stream_key({kBiasTag, ctx.t})});
        const double level = c / std::sqrt(static_cast<double>(ctx.t) + 1.0) * (max_norm(ctx.J) + 1.0);
        ValueVector u(ctx.J.size());
        for (auto& x : u) x = rng.uniform(-level, level);
        return u;
    };
}

ComparisonTrace comparison_iterate(ComparisonKind kind, const std::function<double(std::size_t)>& schedule,
                                   const ComparisonDriver& driver, std::size_t t0,
                                   std::size_t iterations, std::uint64_t seed, double initial) {
    if (!schedule) throw ConfigError("comparison_iterate: schedule is missing");
    if (kind == ComparisonKind::V && !driver.noise) throw ConfigError("comparison_iterate: V needs noise");
    if (kind == ComparisonKind::Y && !driver.level) throw ConfigError("comparison_iterate: Y needs a level");

    ComparisonTrace out;
    out.t0 = t0;
    out.value.reserve(iterations + 1);
    double x = kind == ComparisonKind::V ? 0.0 : initial;
    out.value.push_back(x);
    if (kind == ComparisonKind::Y) out.ratio.push_back(std::abs(x / driver.level(t0)));

    for (std::size_t t = t0; t < t0 + iterations; ++t) {
        const double gamma = schedule(t);
        if (kind == ComparisonKind::V) {
            const double w = driver.noise(t, RngStream{seed, stream_key({kComparisonTag, t})});
            x = (1.0 - gamma) * x + gamma * w;
        } else {
            const double level = driver.level(t);
            if (!(level > 0.0)) throw DomainError("comparison_iterate: G_t must be positive");
            x = (1.0 - gamma) * x + gamma * level;
        }
        out.value.push_back(x);
        if (kind == ComparisonKind::Y) out.ratio.push_back(std::abs(x / driver.level(t + 1)));
    }
    return out;
}

} // namespace ssp
