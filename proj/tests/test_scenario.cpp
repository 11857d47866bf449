#include "gammatc/scenario.hpp"

#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

using namespace gammatc;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "gammatc-scenario-tests";
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const std::string& stem, const std::string& body) {
    const fs::path path = scratch_dir() / (stem + ".cfg");
    std::ofstream out(path);
    out << body;
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// what() of the invalid_argument thrown while parsing `body`
std::string parse_error(const std::string& stem, const std::string& body) {
    const fs::path path = write_config(stem, body);
    try {
        (void)parse_config(path.string());
    } catch (const std::invalid_argument& e) {
        return e.what();
    }
    FAIL("expected a config error for " << stem);
    return {};
}

} // namespace

TEST_CASE("config parser: minimal file keeps every documented default") {
    const auto path = write_config("minimal",
                                   "name = smoke\n"
                                   "experiments = verify-be\n"
                                   "tol_verify_be = 1e-2\n");
    const Scenario s = parse_config(path.string());
    CHECK(s.name == "smoke");
    CHECK(s.model == "flat_s1");
    CHECK(s.resolution == 256);
    CHECK(s.weight == "zero");
    CHECK(s.amplitude == 0.1);
    CHECK(s.nprime.is_infinite());
    CHECK(s.kprime_predicted);
    CHECK(s.output_dir == "out");
    CHECK_FALSE(s.has_seed);
    CHECK(s.experiments == std::vector<std::string>{"verify-be"});
    CHECK(s.tolerance.at("verify-be") == 1e-2);
    CHECK(s.times == std::vector<double>{0.1, 0.5, 1.0});
    CHECK(s.steps_per_unit == 1000);
    CHECK(s.paths == 100000);
    CHECK(s.pairs == 1000);
    CHECK(s.bm_time == 0.25);
    CHECK(s.sweep_count == 100000);
    CHECK(s.disc_radius == 0.8);
    CHECK(s.conv_r0 == 1.0);
}

TEST_CASE("config parser: comments, spacing and value forms") {
    const auto path = write_config("forms",
                                   "# full-line comment\n"
                                   "name=spaced   # trailing comment\n"
                                   "\n"
                                   "model = conformal_t2\n"
                                   "resolution = 32\n"
                                   "nprime = 4.5\n"
                                   "kprime = -0.25\n"
                                   "times = 0.5, 1.0\n"
                                   "experiments = verify-be, verify-thmB\n"
                                   "tol_verify_be = 0.01\n"
                                   "tol_verify_thmb = 1e-3\n");
    const Scenario s = parse_config(path.string());
    CHECK(s.name == "spaced");
    CHECK(s.model == "conformal_t2");
    CHECK(s.resolution == 32);
    CHECK_FALSE(s.nprime.is_infinite());
    CHECK(s.nprime.value() == 4.5);
    CHECK_FALSE(s.kprime_predicted);
    CHECK(s.kprime_override == -0.25);
    CHECK(s.times == std::vector<double>{0.5, 1.0});
    CHECK(s.tolerance.at("verify-thmB") == 1e-3);
}

TEST_CASE("config parser: each schema violation names its key and line") {
    const std::string base = "name = x\nexperiments = verify-be\ntol_verify_be = 1e-2\n";

    std::string msg = parse_error("unknown-key", base + "banana = 7\n");
    CHECK(msg.find("banana") != std::string::npos);
    CHECK(msg.find("line 4") != std::string::npos);
    CHECK(msg.find("unknown key") != std::string::npos);

    msg = parse_error("dup-key", "name = x\nname = y\n" + base);
    CHECK(msg.find("assigned twice") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);

    msg = parse_error("no-equals", base + "just some words\n");
    CHECK(msg.find("expected key = value") != std::string::npos);

    msg = parse_error("bad-number", base + "amplitude = fast\n");
    CHECK(msg.find("amplitude") != std::string::npos);
    CHECK(msg.find("fast") != std::string::npos);

    msg = parse_error("unknown-exp",
                      "name = x\nexperiments = warp-drive\ntol_verify_be = 1\n");
    CHECK(msg.find("warp-drive") != std::string::npos);
    CHECK(msg.find("verify-be") != std::string::npos); // lists the valid names

    msg = parse_error("missing-tol", "name = x\nexperiments = verify-thmB\n");
    CHECK(msg.find("tol_verify_thmb") != std::string::npos);
    CHECK(msg.find("no defaults") != std::string::npos);

    msg = parse_error("needs-seed",
                      "name = x\nexperiments = distance\ntol_distance = 1e-12\n");
    CHECK(msg.find("seed") != std::string::npos);
    CHECK(msg.find("distance") != std::string::npos);

    msg = parse_error("low-res", base + "resolution = 8\n");
    CHECK(msg.find("resolution") != std::string::npos);
}

TEST_CASE("config parser: dimension bound must exceed the model dimension") {
    // flat_t2 carries N = 3; asking for N' = 3 must fail loudly.
    const std::string msg = parse_error("nprime-closed",
                                        "name = x\n"
                                        "model = flat_t2\n"
                                        "nprime = 3\n"
                                        "experiments = verify-thmB\n"
                                        "tol_verify_thmb = 1e-4\n");
    CHECK(msg.find("open interval") != std::string::npos);
    CHECK(msg.find("flat_t2") != std::string::npos);
}

TEST_CASE("config parser: times must sit on the step grid") {
    const std::string msg = parse_error("off-grid",
                                        "name = x\n"
                                        "experiments = verify-be\n"
                                        "tol_verify_be = 1e-2\n"
                                        "steps_per_unit = 10\n"
                                        "times = 0.15, 0.5\n");
    CHECK(msg.find("step grid") != std::string::npos);
}

TEST_CASE("scenario validation: duplicates and model constraints") {
    Scenario s;
    s.name = "v";
    s.experiments = {"verify-be", "verify-be"};
    s.tolerance["verify-be"] = 1e-2;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);

    s.experiments = {"convexify"};
    s.tolerance["convexify"] = 1e-2;
    s.seed = 7;
    s.has_seed = true;
    s.model = "flat_s1"; // one-dimensional: no disc to carve out
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.model = "flat_t2";
    CHECK_NOTHROW(s.validate());
}

TEST_CASE("run: smoke scenario writes artifacts and a reproducible report") {
    Scenario s;
    s.name = "smoke";
    s.model = "flat_s1";
    s.resolution = 64;
    s.experiments = {"verify-be"};
    s.tolerance["verify-be"] = 1e-2;
    s.output_dir = (scratch_dir() / "runs").string();

    const RunReport first = run(s);
    CHECK(first.global_pass);
    REQUIRE(first.results.size() == 1);
    CHECK(first.results[0].name == "verify-be");
    CHECK(first.results[0].pass);
    CHECK(first.results[0].runtime_sec >= 0.0);
    REQUIRE(first.results[0].artifacts.size() == 1);
    CHECK(fs::exists(first.results[0].artifacts[0]));
    CHECK(fs::exists(first.report_path));
    CHECK(fs::exists(first.metadata_path));

    const std::string report_once = slurp(first.report_path);
    const RunReport second = run(s);
    CHECK(slurp(second.report_path) == report_once); // timestamps live elsewhere

    // the report echoes the full configuration and the verdict
    const Json doc = Json::parse(report_once);
    CHECK(doc["pass"].get<bool>());
    CHECK(doc["scenario"]["model"].get<std::string>() == "flat_s1");
    CHECK(doc["scenario"]["resolution"].get<int>() == 64);
    CHECK(doc["experiments"].size() == 1);
    CHECK(doc["experiments"][0]["details"]["min_defect"].get<double>() > -1e-2);
}

TEST_CASE("run: inequality sweeps pass at a small sample count") {
    Scenario s;
    s.name = "sweeps-smoke";
    s.experiments = {"sweeps"};
    s.tolerance["sweeps"] = 1e-10;
    s.sweep_count = 2000;
    s.seed = 99;
    s.has_seed = true;
    s.output_dir = (scratch_dir() / "runs").string();

    const RunReport rep = run(s);
    CHECK(rep.global_pass);
    const Json doc = Json::parse(slurp(rep.report_path));
    CHECK(doc["experiments"][0]["details"]["quartic_min_eigenvalue"].get<double>() >= -1e-10);
    CHECK(doc["experiments"][0]["details"]["matrix_inequality_worst"].get<double>() >= -1e-10);
}

TEST_CASE("run: experiment failures carry the experiment name") {
    Scenario s;
    s.name = "broken";
    s.experiments = {"verify-be"};
    s.tolerance["verify-be"] = 1e-2;
    s.model = "nowhere";
    CHECK_THROWS_AS(run(s), std::invalid_argument); // rejected by validate, not mid-run
}
