#include "commands.hpp"

#include "ssp/csv.hpp"
#include "ssp/dp.hpp"
#include "ssp/errors.hpp"
#include "ssp/mdp_json.hpp"
#include "ssp/modification.hpp"
#include "ssp/montecarlo.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <ostream>
#include <sstream>

namespace ssp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Thrown when an output file or directory cannot be written (exit 4).
class OutputError : public Error {
public:
    using Error::Error;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string fmt_vector(const ValueVector& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s + "]";
}

std::string policy_label(const Mdp& mdp, const Policy& mu) {
    if (auto name = two_state_policy_name(mdp, mu)) return *name;
    std::string s = "(";
    for (std::size_t i = 0; i < mu.size(); ++i) s += (i ? "," : "") + mdp.action_name(mu[i]);
    return s + ")";
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep))
        if (!item.empty()) parts.push_back(item);
    return parts;
}

double parse_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size()) throw ConfigError("not a number: " + s);
    return v;
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    for (const auto& part : split(s, ',')) out.push_back(parse_double(part));
    return out;
}

Mdp fixture_mdp(const std::string& name, double alpha) {
    if (name == "two-state") return two_state_example(alpha);
    if (name == "loop-or-exit") return loop_or_exit_example();
    throw ConfigError("unknown fixture: " + name);
}

// Accepts a two-state name (l, r, g, w), or one entry per state given as an
// action name or a 1-based action index.
Policy parse_policy(const Mdp& mdp, const std::string& text) {
    if (auto named = two_state_policy(text); named && mdp.num_states() == 2 &&
                                             mdp.actions() == std::vector<std::string>{"l", "r"})
        return *named;
    const auto parts = split(text, ',');
    if (parts.size() != mdp.num_states())
        throw ConfigError("policy needs one action per state (" + std::to_string(mdp.num_states()) + ")");
    Policy mu;
    for (const auto& p : parts) {
        if (auto a = mdp.find_action(p)) {
            mu.choice.push_back(*a);
            continue;
        }
        std::size_t used = 0;
        unsigned long idx = 0;
        try {
            idx = std::stoul(p, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != p.size() || idx < 1 || idx > mdp.num_actions())
            throw ConfigError("unknown action: " + p);
        mu.choice.push_back(idx - 1);
    }
    return mu;
}

void prepare_output_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw OutputError("cannot create output directory " + dir.string());
    const fs::path probe = dir / ".write_probe";
    {
        std::ofstream out(probe);
        if (!out) throw OutputError("output directory is not writable: " + dir.string());
    }
    fs::remove(probe, ec);
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw OutputError("cannot write " + path.string());
    out << content;
    if (!out) throw OutputError("write failed for " + path.string());
}

std::optional<ValueVector> try_optimal(const Mdp& mdp) {
    try {
        return brute_force_oracle(mdp).first;
    } catch (const Error&) {
        return std::nullopt;
    }
}

MCESVariant parse_variant(const std::string& s) {
    if (s == "sync") return MCESVariant::sync;
    if (s == "uniform") return MCESVariant::uniform;
    if (s == "nonuniform_percomponent") return MCESVariant::nonuniform_percomponent;
    if (s == "nonuniform_scalar") return MCESVariant::nonuniform_scalar;
    throw ConfigError("unknown variant: " + s);
}

StepsizeSchedule parse_schedule(const json& j) {
    using K = StepsizeSchedule::Kind;
    static const std::map<std::string, K> kinds = {{"harmonic", K::harmonic},
                                                   {"visit_count", K::visit_count},
                                                   {"scaled_harmonic", K::scaled_harmonic},
                                                   {"scalar_harmonic", K::scalar_harmonic}};
    StepsizeSchedule s;
    if (j.is_string()) {
        auto it = kinds.find(j.get<std::string>());
        if (it == kinds.end()) throw ConfigError("unknown schedule: " + j.get<std::string>());
        s.kind = it->second;
        return s;
    }
    if (!j.is_object() || !j.contains("kind")) throw ConfigError("schedule needs a kind");
    auto it = kinds.find(j.at("kind").get<std::string>());
    if (it == kinds.end()) throw ConfigError("unknown schedule: " + j.at("kind").get<std::string>());
    s.kind = it->second;
    s.c = j.value("c", 1.0);
    s.offset = j.value("offset", 1.0);
    return s;
}

StepsizeSchedule default_schedule(MCESVariant v) {
    switch (v) {
    case MCESVariant::nonuniform_percomponent: return StepsizeSchedule::visit_count();
    case MCESVariant::nonuniform_scalar: return StepsizeSchedule::scalar_harmonic();
    default: return StepsizeSchedule::harmonic();
    }
}

SelectionScheme default_selection(MCESVariant v, const std::vector<double>& p) {
    switch (v) {
    case MCESVariant::sync: return SelectionScheme::synchronous();
    case MCESVariant::uniform: return SelectionScheme::uniform();
    default:
        if (p.empty()) throw ConfigError("nonuniform variants need selection probabilities \"p\"");
        return SelectionScheme::categorical(p);
    }
}

} // namespace

ExperimentConfig parse_experiment_config(const std::string& text, const fs::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");

    ExperimentConfig c;
    try {
        if (doc.contains("mdp")) {
            c.mdp_path = doc.at("mdp").get<std::string>();
            if (c.mdp_path.is_relative()) c.mdp_path = base_dir / c.mdp_path;
        }
        if (doc.contains("fixture")) c.fixture = doc.at("fixture").get<std::string>();
        if (c.mdp_path.empty() == c.fixture.empty())
            throw ConfigError("config needs exactly one of \"mdp\" and \"fixture\"");
        c.alpha = doc.value("alpha", 0.9);

        auto& m = c.mces;
        m.variant = parse_variant(doc.value("variant", std::string("sync")));
        m.schedule = doc.contains("schedule") ? parse_schedule(doc.at("schedule")) : default_schedule(m.variant);
        std::vector<double> p;
        if (doc.contains("p")) p = doc.at("p").get<std::vector<double>>();
        m.selection = default_selection(m.variant, p);
        m.iterations = doc.value("iterations", std::size_t{1000});
        m.episodes_per_eval = doc.value("episodes_per_eval", std::size_t{1});
        m.episode_cap = doc.value("episode_cap", std::size_t{0});
        const std::string mode = doc.value("eval_mode", std::string("monte_carlo"));
        if (mode == "exact") m.eval_mode = EvalMode::exact;
        else if (mode != "monte_carlo") throw ConfigError("unknown eval_mode: " + mode);
        if (doc.contains("initial")) m.initial = doc.at("initial").get<std::vector<double>>();
        m.divergence_threshold = doc.value("divergence_threshold", 1e12);

        if (doc.contains("seeds")) {
            c.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
        } else {
            const auto first = doc.value("seed", std::uint64_t{1});
            const auto reps = doc.value("replications", std::size_t{1});
            for (std::size_t k = 0; k < reps; ++k) c.seeds.push_back(first + k);
        }
        if (c.seeds.empty()) throw ConfigError("replications must be >= 1");

        c.output_dir = doc.value("output_dir", std::string("out"));
        if (c.output_dir.is_relative()) c.output_dir = base_dir / c.output_dir;
        c.tol = doc.value("tol", 0.2);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field has the wrong type: ") + e.what());
    }
    return c;
}

Mdp resolve_mdp(const ExperimentConfig& config) {
    if (!config.fixture.empty()) return fixture_mdp(config.fixture, config.alpha);
    return load_mdp(config.mdp_path);
}

int cmd_run(const ExperimentConfig& config, std::ostream& out, std::ostream&) {
    const Mdp mdp = resolve_mdp(config);
    check_config(config.mces, mdp.num_states());
    const auto jstar = try_optimal(mdp);
    prepare_output_dir(config.output_dir);

    std::vector<std::future<std::pair<std::string, SummaryRow>>> jobs;
    for (auto seed : config.seeds) {
        jobs.push_back(std::async(std::launch::async, [&, seed] {
            MCESConfig m = config.mces;
            m.seed = seed;
            const RunTrace trace = run_mces(mdp, m, jstar);
            std::ostringstream csv;
            write_trace_csv(csv, trace);
            SummaryRow row{seed, {}};
            if (jstar) {
                row.summary = convergence_summary(trace, *jstar, config.tol);
            } else {
                row.summary.final_t = trace.records.back().t;
                row.summary.final_dist_opt = std::numeric_limits<double>::quiet_NaN();
                row.summary.final_policy = trace.records.back().policy.value_or(0);
                row.summary.diverged = trace.diverged;
            }
            return std::make_pair(csv.str(), row);
        }));
    }
    std::vector<SummaryRow> rows;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        auto [csv, row] = jobs[k].get();
        write_file(config.output_dir / ("trace_" + std::to_string(config.seeds[k]) + ".csv"), csv);
        rows.push_back(row);
        out << "seed=" << row.seed << " final_t=" << row.summary.final_t
            << " final_dist_opt=" << fmt(row.summary.final_dist_opt)
            << " converged=" << (row.summary.converged ? "true" : "false")
            << " diverged=" << (row.summary.diverged ? "true" : "false") << '\n';
    }
    std::ostringstream summary;
    write_summary_csv(summary, rows);
    write_file(config.output_dir / "summary.csv", summary.str());
    out << "traces=" << rows.size() << " output_dir=" << config.output_dir.string() << '\n';
    return kExitOk;
}

std::vector<std::size_t> log_grid(std::size_t last) {
    std::vector<std::size_t> ts;
    for (std::size_t t = 0; t <= std::min<std::size_t>(last, 9); ++t) ts.push_back(t);
    for (int k = 20;; ++k) {
        const auto t = static_cast<std::size_t>(std::llround(std::pow(10.0, k / 20.0)));
        if (t >= last) break;
        if (t > ts.back()) ts.push_back(t);
    }
    if (ts.back() != last) ts.push_back(last);
    return ts;
}

namespace {

struct PanelSpec {
    std::string name;
    MCESVariant variant;
    StepsizeSchedule schedule;
    std::string description;
};

} // namespace

int cmd_figure(const FigureOptions& options, std::ostream& out, std::ostream&) {
    if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
    if (options.seeds.empty()) throw ConfigError("figure needs at least one seed");
    const Mdp mdp = two_state_example(options.alpha);
    const auto [jstar, mu_star] = brute_force_oracle(mdp);
    const ValueVector& initial = options.initial;
    if (initial.size() != 2) throw ConfigError("figure needs a two-component initial vector");
    prepare_output_dir(options.output_dir);

    const std::vector<PanelSpec> panels = {
        {"a", MCESVariant::nonuniform_percomponent, StepsizeSchedule::scaled_harmonic(),
         "nonuniform_percomponent schedule=scaled_harmonic(1/(t+1))/p"},
        {"b", MCESVariant::nonuniform_percomponent, StepsizeSchedule::visit_count(),
         "nonuniform_percomponent schedule=visit_count"},
        {"c", MCESVariant::nonuniform_scalar, StepsizeSchedule::scalar_harmonic(),
         "nonuniform_scalar schedule=1/(t+1)"},
        {"d", MCESVariant::nonuniform_scalar, StepsizeSchedule::scalar_harmonic(),
         "nonuniform_scalar schedule=1/(t+1)"},
    };

    // Panels c and d plot the same runs, so each distinct cell runs once.
    struct Cell {
        std::size_t panel;
        double p;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (std::size_t k = 0; k < 3; ++k)
        for (double p : options.p_grid)
            for (auto seed : options.seeds) cells.push_back({k, p, seed});

    std::vector<std::future<RunTrace>> jobs;
    for (const Cell& cell : cells) {
        jobs.push_back(std::async(std::launch::async, [&, cell] {
            MCESConfig m;
            m.variant = panels[cell.panel].variant;
            m.schedule = panels[cell.panel].schedule;
            m.selection = SelectionScheme::categorical({cell.p, 1.0 - cell.p});
            m.iterations = options.iterations;
            m.seed = cell.seed;
            m.initial = initial;
            return run_mces(mdp, m, jstar);
        }));
    }
    std::vector<RunTrace> traces;
    for (auto& j : jobs) traces.push_back(j.get());

    std::string seed_list;
    for (std::size_t k = 0; k < options.seeds.size(); ++k)
        seed_list += (k ? "," : "") + std::to_string(options.seeds[k]);
    std::string p_list;
    for (std::size_t k = 0; k < options.p_grid.size(); ++k) p_list += (k ? "," : "") + fmt(options.p_grid[k]);

    for (std::size_t k = 0; k < panels.size(); ++k) {
        const std::size_t source = std::min<std::size_t>(k, 2);
        std::ostringstream csv;
        csv << "# panel=" << panels[k].name << " alpha=" << fmt(options.alpha)
            << " iterations=" << options.iterations << " seeds=" << seed_list << " p=" << p_list
            << " initial=" << fmt(initial[0]) << "," << fmt(initial[1])
            << " variant=" << panels[k].description << " build=" << build_id() << '\n';
        csv << "series,p,seed,t,J_1,J_2,policy,dist_opt\n";
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (cells[c].panel != source) continue;
            const RunTrace& tr = traces[c];
            const auto& recs = tr.records;
            for (std::size_t t : log_grid(recs.back().t)) {
                const TraceRecord& r = recs[t];
                csv << "trajectory," << format_number(cells[c].p) << ',' << cells[c].seed << ',' << r.t
                    << ',' << format_number(r.J[0]) << ',' << format_number(r.J[1]) << ','
                    << policy_label(mdp, policy_from_index(*r.policy, 2, 2)) << ','
                    << format_number(r.dist_opt) << '\n';
            }
            if (panels[k].name != "d") {
                const auto s = convergence_summary(tr, jstar, 0.3);
                out << "panel=" << panels[k].name << " p=" << fmt(cells[c].p) << " seed=" << cells[c].seed
                    << " final_dist_opt=" << fmt(s.final_dist_opt)
                    << " final_policy=" << policy_label(mdp, policy_from_index(s.final_policy, 2, 2))
                    << " diverged=" << (s.diverged ? "true" : "false") << '\n';
            }
        }
        if (panels[k].name == "d") {
            const double shift = 1.0 / options.alpha;
            for (int x2 = -2; x2 <= 24; ++x2) {
                const double x = 0.5 * x2;
                csv << "boundary_plus,,,," << format_number(x) << ',' << format_number(x + shift) << ",,\n";
                csv << "boundary_minus,,,," << format_number(x) << ',' << format_number(x - shift) << ",,\n";
            }
        }
        write_file(options.output_dir / ("panel_" + panels[k].name + ".csv"), csv.str());
    }
    out << "panels=4 output_dir=" << options.output_dir.string() << '\n';
    return kExitOk;
}

namespace {

struct ModelArgs {
    std::string file;
    std::string fixture;
    double alpha = 0.9;

    void attach(CLI::App* app) {
        app->add_option("file", file, "MDP JSON file");
        app->add_option("--fixture", fixture, "Built-in model: two-state or loop-or-exit");
        app->add_option("--alpha", alpha, "Discount factor for the two-state fixture");
    }
    Mdp load() const {
        if (file.empty() == fixture.empty()) throw ConfigError("give either a file or --fixture");
        if (!fixture.empty()) return fixture_mdp(fixture, alpha);
        return load_mdp(file);
    }
};

int report_error(std::ostream& err, const char* kind, const std::exception& e, int code) {
    err << "error: " << kind << ": " << e.what() << '\n';
    return code;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Monte Carlo exploring starts and optimistic policy iteration for stochastic shortest paths",
                 "ssp-mces"};
    app.require_subcommand(1);
    app.set_version_flag("--version", build_id());

    ModelArgs model;
    double tol = 1e-10;
    std::string policy_text;
    std::size_t start = 1, episodes = 1000, cap = 0;
    std::uint64_t seed = 1;
    std::string config_path, out_path, eps_grid = "0.5,0.1,0.01,0.001";
    double p_eps = 0.1, target_eps = 1e-3;
    FigureOptions fig;
    std::string seeds_text = "1,2,3,4,5", p_text = "0.2,0.35,0.5,0.65,0.8", initial_text;
    std::string fig_out;

    auto* validate_cmd = app.add_subcommand("validate", "Check an MDP file");
    validate_cmd->add_option("file", model.file, "MDP JSON file")->required();

    auto* solve_cmd = app.add_subcommand("solve", "Optimal costs by value iteration, cross-checked by enumeration");
    model.attach(solve_cmd);
    solve_cmd->add_option("--tol", tol, "Bellman residual tolerance");

    auto* eval_cmd = app.add_subcommand("eval", "Exact cost of a policy");
    model.attach(eval_cmd);
    eval_cmd->add_option("--policy", policy_text, "l/r/g/w, or one action name or 1-based index per state")
        ->required();

    auto* cert_cmd = app.add_subcommand("certificate", "Weights theta and modulus beta of the contraction");
    model.attach(cert_cmd);

    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of a policy cost");
    model.attach(sim_cmd);
    sim_cmd->add_option("--policy", policy_text, "Policy to simulate")->required();
    sim_cmd->add_option("--start", start, "Start state (1-based)");
    sim_cmd->add_option("--episodes", episodes, "Number of episodes");
    sim_cmd->add_option("--cap", cap, "Episode length cap (0: from the certificate)");
    sim_cmd->add_option("--seed", seed, "Seed");

    auto* run_cmd = app.add_subcommand("run", "Run replications from a JSON config");
    run_cmd->add_option("--config", config_path, "Config file")->required();

    auto* modify_cmd = app.add_subcommand("modify", "Write the epsilon-terminating modification");
    modify_cmd->add_option("file", model.file, "MDP JSON file")->required();
    modify_cmd->add_option("--p-eps", p_eps, "Termination probability")->required();
    modify_cmd->add_option("--out", out_path, "Output file")->required();

    auto* scan_cmd = app.add_subcommand("scan", "Optimal-policy preservation under the modification");
    model.attach(scan_cmd);
    scan_cmd->add_option("--eps-grid", eps_grid, "Descending comma-separated p_eps values");
    scan_cmd->add_option("--target-eps", target_eps, "Smallest p_eps of interest");
    scan_cmd->add_option("--out", out_path, "CSV output file (default: stdout)");

    auto* fig_cmd = app.add_subcommand("figure", "Data for the two-state convergence panels");
    fig_cmd->add_option("--alpha", fig.alpha, "Discount factor");
    fig_cmd->add_option("--iters", fig.iterations, "Iterations per run");
    fig_cmd->add_option("--seeds", seeds_text, "Comma-separated seeds");
    fig_cmd->add_option("--p", p_text, "Comma-separated p(1) values");
    fig_cmd->add_option("--initial", initial_text, "Initial J as J1,J2 (default 2,0)");
    fig_cmd->add_option("--out", fig_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << build_id() << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*validate_cmd) {
            const Mdp mdp = load_mdp(model.file);
            out << "valid=true states=" << mdp.num_states() << " actions=" << mdp.num_actions() << '\n';
            return kExitOk;
        }
        if (*solve_cmd) {
            const Mdp mdp = model.load();
            const auto [J, mu] = optimal_value_vi(mdp, tol);
            out << "J* = " << fmt_vector(J) << "; policy = " << policy_label(mdp, mu) << '\n';
            try {
                const auto [Jo, muo] = brute_force_oracle(mdp);
                double diff = 0.0;
                for (std::size_t i = 0; i < J.size(); ++i) diff = std::max(diff, std::abs(J[i] - Jo[i]));
                out << "oracle_max_diff=" << fmt(diff) << '\n';
                out << "oracle_policy=" << policy_label(mdp, muo) << '\n';
            } catch (const SizeError&) {
                out << "oracle=skipped reason=too_many_policies\n";
            }
            return kExitOk;
        }
        if (*eval_cmd) {
            const Mdp mdp = model.load();
            out << fmt_vector(policy_value_exact(mdp, parse_policy(mdp, policy_text))) << '\n';
            return kExitOk;
        }
        if (*cert_cmd) {
            const Mdp mdp = model.load();
            const auto cert = contraction_certificate(mdp);
            out << "theta = " << fmt_vector(cert.theta) << "; beta = " << fmt(cert.beta) << '\n';
            return kExitOk;
        }
        if (*sim_cmd) {
            const Mdp mdp = model.load();
            const Policy mu = parse_policy(mdp, policy_text);
            if (start < 1 || start > mdp.num_states()) throw ConfigError("--start out of range");
            if (episodes == 0) throw ConfigError("--episodes must be >= 1");
            std::size_t used_cap = cap;
            if (used_cap == 0) used_cap = default_episode_cap(mdp, contraction_certificate(mdp));
            const auto est = mc_policy_estimate(mdp, mu, start - 1, episodes, used_cap, RngStream{seed, 0});
            out << "mean=" << fmt(est.mean) << '\n'
                << "std_error=" << fmt(est.std_error) << '\n'
                << "episodes=" << episodes << '\n'
                << "cap=" << used_cap << '\n'
                << "truncated=" << est.truncation_count << '\n';
            return kExitOk;
        }
        if (*run_cmd) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("cannot open " + config_path);
            std::ostringstream ss;
            ss << in.rdbuf();
            return cmd_run(parse_experiment_config(ss.str(), fs::path(config_path).parent_path()), out, err);
        }
        if (*modify_cmd) {
            const Mdp modified = epsilon_terminate(load_mdp(model.file), p_eps);
            try {
                save_mdp(modified, out_path);
            } catch (const Error& e) {
                throw OutputError(e.what());
            }
            out << "written=" << out_path << " p_eps=" << fmt(p_eps) << '\n';
            return kExitOk;
        }
        if (*scan_cmd) {
            const Mdp mdp = model.load();
            const auto report = preservation_scan(mdp, parse_doubles(eps_grid), target_eps);
            std::ostringstream csv;
            write_preservation_csv(csv, report);
            if (out_path.empty()) {
                out << csv.str();
            } else {
                write_file(out_path, csv.str());
            }
            out << "threshold_estimate="
                << (report.threshold_estimate ? fmt(*report.threshold_estimate) : std::string("none")) << '\n';
            return kExitOk;
        }
        if (*fig_cmd) {
            fig.output_dir = fig_out;
            fig.seeds.clear();
            for (const auto& s : split(seeds_text, ',')) fig.seeds.push_back(std::stoull(s));
            fig.p_grid = parse_doubles(p_text);
            if (!initial_text.empty()) {
                fig.initial = parse_doubles(initial_text);
                if (fig.initial.size() != 2) throw ConfigError("--initial needs two values");
            }
            return cmd_figure(fig, out, err);
        }
    } catch (const ValidationError& e) {
        return report_error(err, "validation", e, kExitValidation);
    } catch (const DomainError& e) {
        return report_error(err, "validation", e, kExitValidation);
    } catch (const AssumptionError& e) {
        return report_error(err, "assumption", e, kExitAssumption);
    } catch (const PropernessError& e) {
        return report_error(err, "assumption", e, kExitAssumption);
    } catch (const OutputError& e) {
        return report_error(err, "output", e, kExitOutput);
    } catch (const std::exception& e) {
        return report_error(err, "error", e, kExitUsage);
    }
    return kExitUsage;
}

} // namespace ssp::cli
