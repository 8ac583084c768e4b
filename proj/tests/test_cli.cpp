#include "commands.hpp"

#include "ssp/mdp_json.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace ssp;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "ssp-mces");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "ssp_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

} // namespace

TEST_CASE("solve, certificate and eval on the fixture") {
    auto r = invoke({"solve", "--fixture", "two-state", "--alpha", "0.9"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("J* = [0, 0]; policy = g\n", 0) == 0);
    CHECK(r.out.find("oracle_max_diff=0") != std::string::npos);

    r = invoke({"certificate", "--fixture", "two-state", "--alpha", "0.9"});
    CHECK(r.code == 0);
    CHECK(r.out == "theta = [10, 10]; beta = 0.9\n");

    CHECK(invoke({"eval", "--fixture", "two-state", "--policy", "w"}).out == "[10, 10]\n");
    CHECK(invoke({"eval", "--fixture", "two-state", "--policy", "l"}).out == "[10, 9]\n");
    CHECK(invoke({"eval", "--fixture", "two-state", "--policy", "r,l"}).out == "[0, 0]\n");
    CHECK(invoke({"eval", "--fixture", "two-state", "--policy", "2,1"}).out == "[0, 0]\n");
    CHECK(invoke({"eval", "--fixture", "two-state", "--policy", "x"}).code == 1);
}

TEST_CASE("exit codes") {
    const fs::path dir = scratch("codes");
    CHECK(invoke({}).code == 1);
    CHECK(invoke({"bogus"}).code == 1);

    std::ofstream(dir / "bad.json") << R"({"n":2,"actions":["a"],"transitions":[[[-0.1,0.5]],[[0,0]]],"costs":[[1],[1]]})";
    auto r = invoke({"validate", (dir / "bad.json").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("(1,a,1)") != std::string::npos);

    save_mdp(two_state_example(0.9), dir / "good.json");
    r = invoke({"validate", (dir / "good.json").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("valid=true") != std::string::npos);

    CHECK(invoke({"certificate", "--fixture", "loop-or-exit"}).code == 3);
    CHECK(invoke({"eval", "--fixture", "two-state", "--alpha", "1", "--policy", "w"}).code == 3);
    CHECK(invoke({"solve", "--fixture", "two-state", "--alpha", "1.5"}).code == 2);

    std::ofstream(dir / "cfg.json") << R"({"fixture":"two-state","iterations":10,"output_dir":"/proc/forbidden/out"})";
    CHECK(invoke({"run", "--config", (dir / "cfg.json").string()}).code == 4);
}

TEST_CASE("simulate reports key=value lines") {
    auto r = invoke({"simulate", "--fixture", "two-state", "--policy", "g", "--start", "2", "--episodes", "100"});
    CHECK(r.code == 0);
    CHECK(r.out.find("mean=0\n") != std::string::npos);
    CHECK(r.out.find("truncated=0\n") != std::string::npos);
    CHECK(invoke({"simulate", "--fixture", "two-state", "--policy", "g", "--start", "3"}).code == 1);
}

TEST_CASE("modify and scan") {
    const fs::path dir = scratch("modify");
    save_mdp(two_state_example(1.0), dir / "m.json");
    auto r = invoke({"modify", (dir / "m.json").string(), "--p-eps", "0.1", "--out", (dir / "mod.json").string()});
    CHECK(r.code == 0);
    CHECK(load_mdp(dir / "mod.json").transitions() == two_state_example(0.9).transitions());

    r = invoke({"scan", "--fixture", "loop-or-exit", "--eps-grid", "0.5,0.1,0.01", "--target-eps", "0.01"});
    CHECK(r.code == 0);
    CHECK(r.out.find("p_eps,value_gap,policy_preserved\n0.5,0,true\n0.1,0,true\n0.01,0,true\n") == 0);
    CHECK(invoke({"scan", "--fixture", "two-state", "--alpha", "1"}).code == 3);
}

TEST_CASE("run writes one trace per replication and a summary") {
    const fs::path dir = scratch("run");
    std::ofstream(dir / "cfg.json") << R"({"fixture":"two-state","alpha":0.9,"variant":"sync",
        "iterations":200,"seed":5,"replications":3,"initial":[10,10],"output_dir":"out"})";
    auto r = invoke({"run", "--config", (dir / "cfg.json").string()});
    REQUIRE(r.code == 0);
    for (int s : {5, 6, 7}) {
        const auto text = slurp(dir / "out" / ("trace_" + std::to_string(s) + ".csv"));
        CHECK(text.rfind("t,sel,gamma,J_1,J_2,c_inf,lambda_inf,policy,dist_opt\n0,-1,0,10,10,", 0) == 0);
        CHECK(count_lines(text) == 202);
        CHECK(text.find("\n1,-2,1,") != std::string::npos);
    }
    const auto summary = slurp(dir / "out" / "summary.csv");
    CHECK(count_lines(summary) == 4);

    const auto first = slurp(dir / "out" / "trace_6.csv");
    REQUIRE(invoke({"run", "--config", (dir / "cfg.json").string()}).code == 0);
    CHECK(slurp(dir / "out" / "trace_6.csv") == first);
}

TEST_CASE("divergent scalar runs are flagged in the summary") {
    const fs::path dir = scratch("diverge");
    std::ofstream(dir / "cfg.json") << R"({"fixture":"two-state","variant":"nonuniform_scalar","p":[0.2,0.8],
        "iterations":500,"seeds":[1],"initial":[10,10],"divergence_threshold":5,"output_dir":"out"})";
    REQUIRE(invoke({"run", "--config", (dir / "cfg.json").string()}).code == 0);
    const auto summary = slurp(dir / "out" / "summary.csv");
    CHECK(summary.find(",true\n") != std::string::npos);
}

TEST_CASE("config parsing") {
    auto c = cli::parse_experiment_config(R"({"fixture":"two-state","variant":"nonuniform_percomponent",
        "p":[0.3,0.7],"schedule":{"kind":"scaled_harmonic","c":1,"offset":1},"seeds":[3,4]})", "/base");
    CHECK(c.mces.variant == MCESVariant::nonuniform_percomponent);
    CHECK(c.mces.schedule.kind == StepsizeSchedule::Kind::scaled_harmonic);
    CHECK(c.seeds == std::vector<std::uint64_t>{3, 4});
    CHECK(c.output_dir == fs::path("/base/out"));

    CHECK_THROWS(cli::parse_experiment_config("{}"));
    CHECK_THROWS(cli::parse_experiment_config(R"({"fixture":"two-state","mdp":"x.json"})"));
    CHECK_THROWS(cli::parse_experiment_config(R"({"fixture":"two-state","variant":"nonuniform_scalar"})"));
    CHECK_THROWS(cli::parse_experiment_config(R"({"fixture":"two-state","replications":0})"));
    CHECK_THROWS(cli::parse_experiment_config(R"({"fixture":"two-state","iterations":"many"})"));
    CHECK_THROWS(cli::parse_experiment_config(R"({"fixture":"two-state","eval_mode":"guess"})"));
}

TEST_CASE("log grid") {
    const auto g = cli::log_grid(100000);
    CHECK(g.front() == 0);
    CHECK(g.back() == 100000);
    CHECK(std::is_sorted(g.begin(), g.end()));
    CHECK(std::adjacent_find(g.begin(), g.end()) == g.end());
    CHECK(g.size() < 120);
    CHECK(cli::log_grid(3) == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("figure panels") {
    const fs::path dir = scratch("figure");
    auto r = invoke({"figure", "--alpha", "0.9", "--iters", "2000", "--seeds", "1,2", "--out", dir.string()});
    REQUIRE(r.code == 0);
    for (const char* panel : {"a", "b", "c", "d"}) {
        const auto text = slurp(dir / (std::string("panel_") + panel + ".csv"));
        CHECK(text.rfind("# panel=", 0) == 0);
        CHECK(text.find("iterations=2000 seeds=1,2 p=0.2,0.35,0.5,0.65,0.8") != std::string::npos);
        CHECK(text.find("\nseries,p,seed,t,J_1,J_2,policy,dist_opt\n") != std::string::npos);
        for (const char* p : {"\ntrajectory,0.2,1,2000,", "\ntrajectory,0.8,2,2000,", "\ntrajectory,0.5,1,0,"})
            CHECK(text.find(p) != std::string::npos);
    }
    const auto d = slurp(dir / "panel_d.csv");
    CHECK(d.find("\nboundary_plus,,,,0,1.1111111111111112,,\n") != std::string::npos);
    CHECK(d.find("\nboundary_minus,,,,0,-1.1111111111111112,,\n") != std::string::npos);
    CHECK(invoke({"figure", "--alpha", "1.0", "--out", dir.string()}).code == 2);
}
