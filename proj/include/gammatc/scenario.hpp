#ifndef GAMMATC_SCENARIO_HPP
#define GAMMATC_SCENARIO_HPP

#include "gammatc/dimension.hpp"
#include "gammatc/io.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace gammatc {

// Scenario runner: a strict key = value config selects a model space, a
// weight, bounds and a list of named experiments; run() wires the modules
// together, writes per-experiment artifacts plus a deterministic
// report.json (timestamps and runtimes live in metadata.json so that equal
// (config, seed, build) gives byte-identical reports).

struct Scenario {
    std::string name;
    std::string model = "flat_s1";
    int resolution = 256;
    std::string weight = "zero";
    double amplitude = 0.1;
    DimensionBound nprime = DimensionBound::infinite();
    bool kprime_predicted = true; // kprime = predicted | <number>
    double kprime_override = 0.0;
    std::vector<std::string> experiments;
    std::map<std::string, double> tolerance; // keyed by experiment name
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::string output_dir = "out";

    std::vector<double> times{0.1, 0.5, 1.0};
    int steps_per_unit = 1000;
    int paths = 100000;
    int pairs = 1000;
    double bm_time = 0.25;
    long sweep_count = 100000;
    double disc_radius = 0.8;
    double conv_r0 = 1.0;
    double conv_K = 0.0;
    double conv_N = 2.0;
    double conv_lp = 0.0; // 0 = default -1.1 / disc_radius

    void validate() const; // schema checks beyond per-key parsing
};

// Closed set of experiment names.
const std::vector<std::string>& experiment_names();

// Strict parser: unknown keys, malformed values and missing requirements
// are errors naming the key and line.  Tolerances have no defaults: every
// listed experiment requires its tolerance entry (key tol_<experiment>,
// dashes as underscores).
Scenario parse_config(const std::string& path);

struct ExperimentResult {
    std::string name;
    bool pass = false;
    Json details;                       // defects, counts, seeds - deterministic
    std::vector<std::string> artifacts; // files written under the output dir
    double runtime_sec = 0.0;           // quarantined to metadata.json
};

struct RunReport {
    std::vector<ExperimentResult> results;
    bool global_pass = false;
    std::string report_path;
    std::string metadata_path;
};

// Executes the experiments in declared order; exceptions are rethrown with
// the experiment name prefixed.  Writes report.json and metadata.json under
// output_dir/name/.
RunReport run(const Scenario& scenario);

} // namespace gammatc

#endif
