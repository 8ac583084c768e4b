#include "ssp/errors.hpp"
#include "ssp/mdp_json.hpp"
#include "ssp/rng.hpp"

#include <doctest.h>

#include <filesystem>

using namespace ssp;

namespace {

// Probabilities that are multiples of 1/64 are exact in binary.
Mdp dyadic_mdp(std::uint64_t seed) {
    StreamEngine rng(RngStream{seed, 0});
    const std::size_t n = 1 + rng() % 4;
    const std::size_t m = 1 + rng() % 3;
    std::vector<std::string> actions;
    for (std::size_t a = 0; a < m; ++a) actions.push_back("act" + std::to_string(a));
    std::vector<double> p(n * m * n, 0.0), g(n * m);
    for (std::size_t row = 0; row < n * m; ++row) {
        int budget = 64;
        for (std::size_t j = 0; j < n; ++j) {
            const int k = static_cast<int>(rng() % (budget + 1));
            p[row * n + j] = k / 64.0;
            budget -= k;
        }
        g[row] = static_cast<double>(rng() % 1000) / 8.0 - 50.0;
    }
    return Mdp(n, actions, p, g);
}

} // namespace

TEST_CASE("parse(serialize(mdp)) reproduces the model exactly") {
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const Mdp m = dyadic_mdp(seed);
        REQUIRE(validate(m).ok());
        CHECK(parse_mdp_json(mdp_to_json(m)) == m);
    }
    // Shortest round-trip formatting also preserves arbitrary doubles.
    const Mdp r = random_ssp(4, 3, 11, true, 0.05);
    CHECK(parse_mdp_json(mdp_to_json(r)) == r);
}

TEST_CASE("file round trip") {
    const auto path = std::filesystem::temp_directory_path() / "ssp_json_roundtrip.json";
    const Mdp m = two_state_example(0.9);
    save_mdp(m, path);
    CHECK(load_mdp(path) == m);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_mdp("/nonexistent/model.json"), ValidationError);
}

TEST_CASE("parser errors carry locations") {
    auto message = [](const std::string& text) {
        try {
            parse_mdp_json(text);
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message("{").find("malformed") != std::string::npos);
    CHECK(message("[]").find("object") != std::string::npos);
    CHECK(message(R"({"actions":["a"],"transitions":[[[0.5]]],"costs":[[1]]})").find("\"n\"") != std::string::npos);
    CHECK(message(R"({"n":1,"actions":["a"],"transitions":[[["x"]]],"costs":[[1]]})")
              .find("transitions[1][a][1]") != std::string::npos);
    CHECK(message(R"({"n":1,"actions":["a"],"transitions":[[[0.5]]],"costs":[[1, 2]]})")
              .find("costs[1]") != std::string::npos);
    CHECK(message(R"({"n":2,"actions":["a"],"transitions":[[[-0.1,0.5]],[[0,0]]],"costs":[[1],[1]]})")
              .find("(1,a,1)") != std::string::npos);
    CHECK(message(R"({"n":1,"actions":["a"],"transitions":[[[1.5]]],"costs":[[1]]})").find("(1,a") !=
          std::string::npos);
}
