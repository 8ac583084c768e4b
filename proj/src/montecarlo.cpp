#include "ssp/montecarlo.hpp"

#include "ssp/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ssp {

void CompensatedSum::add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
        comp_ += (sum_ - t) + x;
    else
        comp_ += (x - t) + sum_;
    sum_ = t;
}

EpisodeResult simulate_episode(const Mdp& mdp, const Policy& mu, std::size_t start, std::size_t cap,
                               const RngStream& rng) {
    const std::size_t n = mdp.num_states();
    if (start >= n) throw DomainError("simulate_episode: start state out of range");
    if (cap == 0) throw DomainError("simulate_episode: cap must be at least 1");

    StreamEngine engine(rng);
    EpisodeResult out;
    std::size_t s = start;
    while (out.steps < cap) {
        const std::size_t a = mu[s];
        out.total_cost += mdp.cost(s, a);
        ++out.steps;

        const double u = engine.uniform();
        auto row = mdp.row(s, a);
        double cumulative = 0.0;
        std::size_t next = n;  // n = terminal
        std::size_t last_positive = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (row[j] > 0.0) last_positive = j;
            cumulative += row[j];
            if (u < cumulative) {
                next = j;
                break;
            }
        }
        // Rounding in a stochastic row must not leak into the terminal state.
        if (next == n && mdp.terminal_mass(s, a) <= kProbTol && last_positive < n)
            next = last_positive;
        if (next == n) return out;
        s = next;
    }
    out.truncated = true;
    return out;
}

McEstimate mc_policy_estimate(const Mdp& mdp, const Policy& mu, std::size_t start,
                              std::size_t episodes, std::size_t cap, const RngStream& rng) {
    if (episodes == 0) throw DomainError("mc_policy_estimate: need at least one episode");
    McEstimate est;
    CompensatedSum sum;
    std::vector<double> returns;
    returns.reserve(episodes);
    for (std::size_t k = 0; k < episodes; ++k) {
        const auto ep = simulate_episode(mdp, mu, start, cap, rng.child({k}));
        if (ep.truncated) ++est.truncation_count;
        returns.push_back(ep.total_cost);
        sum.add(ep.total_cost);
    }
    est.mean = sum.value() / static_cast<double>(episodes);
    if (episodes > 1) {
        CompensatedSum sq;
        for (double r : returns) sq.add((r - est.mean) * (r - est.mean));
        const double var = sq.value() / static_cast<double>(episodes - 1);
        est.std_error = std::sqrt(var / static_cast<double>(episodes));
    }
    return est;
}

double truncation_bias_bound(const Mdp& mdp, const ContractionCertificate& cert, std::size_t start,
                             std::size_t cap) {
    const double gmax = max_norm(mdp.costs());
    return std::pow(cert.beta, static_cast<double>(cap)) * cert.theta.at(start) * gmax /
           (1.0 - cert.beta);
}

std::size_t default_episode_cap(const Mdp& mdp, const ContractionCertificate& cert, double tol) {
    const double gmax = max_norm(mdp.costs());
    const double theta_max = *std::max_element(cert.theta.begin(), cert.theta.end());
    if (gmax == 0.0 || cert.beta == 0.0) return std::max<std::size_t>(1, mdp.num_states());
    const double ratio = tol * (1.0 - cert.beta) / (theta_max * gmax);
    if (ratio >= 1.0) return 1;
    const double k = std::ceil(std::log(ratio) / std::log(cert.beta));
    return static_cast<std::size_t>(std::max(1.0, k));
}

} // namespace ssp
