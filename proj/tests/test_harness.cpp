#include "nehari/config.hpp"
#include "nehari/experiment.hpp"

#include "doctest.h"

#include <fstream>
#include <sstream>

using namespace nehari;

namespace {

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig small_config()
{
    return parse_config(R"(# coarse sphere, two eps values
shape = sphere
refine = 3
eps = 0.3, 0.25
rho = 0.02
h_seeds = 5
max_solutions_per_seed = 1
)");
}

}  // namespace

TEST_CASE("config parsing")
{
    const RunConfig c = small_config();
    CHECK(c.shape == "sphere");
    CHECK(c.eps_list == std::vector<double>{0.3, 0.25});
    CHECK(c.h_seeds == std::vector<std::uint64_t>{5});
    CHECK(c.params.n == 2);
    validate(c);
    // canonical text round trips
    const RunConfig again = parse_config(format_config(c));
    CHECK(format_config(again) == format_config(c));
    CHECK(config_hash(again) == config_hash(c));
    CHECK(config_hash(c).size() == 16);
    RunConfig other = c;
    other.eps_list = {0.3};
    CHECK(config_hash(other) != config_hash(c));

    CHECK_THROWS_AS(parse_config("colour = blue\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("eps = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("no equals sign\n"), ConfigError);
}

TEST_CASE("config validation")
{
    RunConfig c = small_config();
    c.eps_list = {1.2};
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = small_config();
    c.solve.tol = 0.0;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = small_config();
    c.characteristic = 6;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = small_config();
    c.delta = 5.85;
    CHECK_THROWS_WITH_AS(validate_delta(c, 5.85), doctest::Contains("m_infty/4"), ConfigError);
    c.delta = 1.0;
    validate_delta(c, 5.85);
    c = small_config();
    c.mesh_file = "/nonexistent/mesh.off";
    CHECK_THROWS_AS(config_mesh(c), ConfigError);
}

TEST_CASE("experiment writes deterministic artifacts")
{
    const std::filesystem::path base = std::filesystem::temp_directory_path() / "nehari_harness_test";
    std::filesystem::remove_all(base);
    const RunConfig c = small_config();
    const Manifest a = run_experiment(c, base / "a");
    const Manifest b = run_experiment(c, base / "b");
    for (const char* name : {"profile.json", "homology.json", "verdict.json", "config.txt"}) {
        CHECK(std::find(a.artifacts.begin(), a.artifacts.end(), name) != a.artifacts.end());
    }
    CHECK(a.verdicts.size() == 4);
    CHECK(a.artifacts == b.artifacts);
    for (const auto& name : a.artifacts) {
        if (name == "manifest.json") continue;
        CAPTURE(name);
        CHECK(slurp(base / "a" / name) == slurp(base / "b" / name));
    }
    const Json homology = Json::parse(slurp(base / "a" / "homology.json"));
    CHECK(homology["p1"] == 2);
    CHECK(homology["field"] == "GF(2)");
    CHECK(homology["config_hash"] == config_hash(c));
    const Json manifest = Json::parse(slurp(base / "a" / "manifest.json"));
    CHECK(manifest.contains("timestamps"));
    const Json verdict = Json::parse(slurp(base / "a" / "verdict.json"));
    for (const auto& run : verdict["runs"]) {
        CHECK(run["verdict"].get<std::string>().find("theorem verified") == std::string::npos);
    }
    std::filesystem::remove_all(base);
}

TEST_CASE("stage failures name the stage")
{
    RunConfig c = small_config();
    c.delta = 100.0;
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "nehari_stage_test";
    try {
        run_experiment(c, dir);
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.stage() == "profile");
        CHECK(std::string(e.what()).find("m_infty/4") != std::string::npos);
    }
    std::filesystem::remove_all(dir);
}
