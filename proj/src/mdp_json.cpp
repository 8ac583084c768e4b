#include "ssp/mdp_json.hpp"

#include "ssp/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace ssp {

using nlohmann::json;

namespace {

const json& require(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end()) throw ValidationError(std::string("missing key \"") + key + "\"");
    return *it;
}

double number_at(const json& v, const std::string& where) {
    if (!v.is_number()) throw ValidationError(where + ": expected a number");
    return v.get<double>();
}

} // namespace

Mdp parse_mdp_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("top level must be an object");

    const json& jn = require(doc, "n");
    if (!jn.is_number_integer() || jn.get<long long>() < 1)
        throw ValidationError("\"n\" must be a positive integer");
    const auto n = static_cast<std::size_t>(jn.get<long long>());

    const json& jactions = require(doc, "actions");
    if (!jactions.is_array() || jactions.empty())
        throw ValidationError("\"actions\" must be a non-empty array of strings");
    std::vector<std::string> actions;
    for (const auto& a : jactions) {
        if (!a.is_string()) throw ValidationError("\"actions\" must contain strings");
        actions.push_back(a.get<std::string>());
    }
    const std::size_t m = actions.size();

    const json& jp = require(doc, "transitions");
    if (!jp.is_array() || jp.size() != n)
        throw ValidationError("\"transitions\" must have n = " + std::to_string(n) + " entries");
    std::vector<double> transitions;
    transitions.reserve(n * m * n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::string si = "transitions[" + std::to_string(i + 1) + "]";
        if (!jp[i].is_array() || jp[i].size() != m)
            throw ValidationError(si + " must have one row per action");
        for (std::size_t a = 0; a < m; ++a) {
            const json& row = jp[i][a];
            const std::string sa = si + "[" + actions[a] + "]";
            if (!row.is_array() || row.size() != n)
                throw ValidationError(sa + " must have n entries");
            for (std::size_t j = 0; j < n; ++j)
                transitions.push_back(number_at(row[j], sa + "[" + std::to_string(j + 1) + "]"));
        }
    }

    const json& jg = require(doc, "costs");
    if (!jg.is_array() || jg.size() != n)
        throw ValidationError("\"costs\" must have n = " + std::to_string(n) + " entries");
    std::vector<double> costs;
    costs.reserve(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        const std::string si = "costs[" + std::to_string(i + 1) + "]";
        if (!jg[i].is_array() || jg[i].size() != m)
            throw ValidationError(si + " must have one entry per action");
        for (std::size_t a = 0; a < m; ++a)
            costs.push_back(number_at(jg[i][a], si + "[" + actions[a] + "]"));
    }

    Mdp mdp(n, std::move(actions), std::move(transitions), std::move(costs));
    const auto report = validate(mdp);
    if (!report.ok()) {
        const auto& v = report.violations.front();
        throw ValidationError(v.location(mdp) + ": " + v.description);
    }
    return mdp;
}

Mdp load_mdp(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_mdp_json(ss.str());
}

std::string mdp_to_json(const Mdp& mdp) {
    const std::size_t n = mdp.num_states();
    const std::size_t m = mdp.num_actions();
    json doc;
    doc["n"] = n;
    doc["actions"] = mdp.actions();
    json transitions = json::array();
    json costs = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        json per_action = json::array();
        json cost_row = json::array();
        for (std::size_t a = 0; a < m; ++a) {
            auto r = mdp.row(i, a);
            per_action.push_back(std::vector<double>(r.begin(), r.end()));
            cost_row.push_back(mdp.cost(i, a));
        }
        transitions.push_back(std::move(per_action));
        costs.push_back(std::move(cost_row));
    }
    doc["transitions"] = std::move(transitions);
    doc["costs"] = std::move(costs);
    return doc.dump(2);
}

void save_mdp(const Mdp& mdp, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << mdp_to_json(mdp) << '\n';
    if (!out) throw Error("write failed for " + path.string());
}

} // namespace ssp
