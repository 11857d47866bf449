#include "gammatc/scenario.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>

// Thin front end: every subcommand assembles a Scenario and hands it to
// run(), so the command line and the config-file path exercise the same
// code and emit the same artifacts.
//
// Exit codes: 0 all checks passed, 1 a verification failed (or aborted),
// 2 usage or config error.

namespace {

gammatc::DimensionBound parse_dim(const std::string& text) {
    if (text == "inf" || text == "infinity") return gammatc::DimensionBound::infinite();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("nprime: not a number: '" + text + "'");
    }
    if (used != text.size() || !(v > 0.0))
        throw std::invalid_argument("nprime: need a positive number or 'inf', got '" + text + "'");
    return gammatc::DimensionBound::finite(v);
}

int report_and_code(const gammatc::RunReport& report) {
    for (const auto& r : report.results)
        std::printf("%s: %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL");
    std::printf("report: %s\n", report.report_path.c_str());
    return report.global_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Curvature-bound transformation checks under time change"};
    app.require_subcommand(1);

    gammatc::Scenario s;
    std::string nprime_text = "inf";
    std::string kprime_text = "predicted";
    std::string config_path;

    auto add_model_flags = [&](CLI::App* cmd) {
        cmd->add_option("--model", s.model, "model space id")->capture_default_str();
        cmd->add_option("--resolution", s.resolution, "nodes along the principal axis")
            ->capture_default_str();
        cmd->add_option("--weight", s.weight, "weight id (zero | const | harmonic)")
            ->capture_default_str();
        cmd->add_option("--amplitude", s.amplitude, "weight amplitude")->capture_default_str();
        cmd->add_option("--output", s.output_dir, "artifact directory")->capture_default_str();
        cmd->add_option("--name", s.name, "run name (artifact subdirectory)");
    };
    auto tol_option = [&](CLI::App* cmd, const char* experiment) {
        cmd->add_option_function<double>(
               "--tolerance",
               [&s, experiment](const double& v) { s.tolerance[experiment] = v; },
               "pass/fail tolerance (required; no default)")
            ->required();
    };

    int exit_code = 0;
    auto execute = [&](const std::string& experiment) {
        if (s.name.empty()) s.name = experiment;
        s.experiments = {experiment};
        exit_code = report_and_code(gammatc::run(s));
    };

    auto* be = app.add_subcommand("verify-be", "Bakry-Emery inequality on a model generator");
    add_model_flags(be);
    tol_option(be, "verify-be");
    be->callback([&] { execute("verify-be"); });

    auto* thmb = app.add_subcommand("verify-thmB",
                                    "transformed curvature bound against the smooth oracle");
    add_model_flags(thmb);
    thmb->add_option("--nprime", nprime_text, "transformed dimension bound (number or 'inf')")
        ->capture_default_str();
    tol_option(thmb, "verify-thmB");
    thmb->callback([&] {
        s.nprime = parse_dim(nprime_text);
        execute("verify-thmB");
    });

    auto* grad = app.add_subcommand("gradient-estimate",
                                    "semigroup gradient estimate on the time-changed generator");
    add_model_flags(grad);
    grad->add_option("--nprime", nprime_text, "transformed dimension bound (number or 'inf')")
        ->capture_default_str();
    grad->add_option("--kprime", kprime_text, "'predicted' or an explicit curvature bound")
        ->capture_default_str();
    grad->add_option("--times", s.times, "check instants")->delimiter(',')->capture_default_str();
    grad->add_option("--steps-per-unit", s.steps_per_unit, "Crank-Nicolson steps per unit time")
        ->capture_default_str();
    tol_option(grad, "gradient-estimate");
    grad->callback([&] {
        s.nprime = parse_dim(nprime_text);
        if (kprime_text == "predicted") {
            s.kprime_predicted = true;
        } else {
            s.kprime_predicted = false;
            s.kprime_override = std::stod(kprime_text);
        }
        execute("gradient-estimate");
    });

    auto* dist = app.add_subcommand("distance", "weighted distance: primal vs dual solver");
    add_model_flags(dist);
    dist->add_option("--pairs", s.pairs, "sampled node pairs")->capture_default_str();
    dist->add_option("--seed", s.seed, "rng seed")->required();
    tol_option(dist, "distance");
    dist->callback([&] {
        s.has_seed = true;
        execute("distance");
    });

    auto* bm = app.add_subcommand("bm-check", "time-changed walk vs Feynman-Kac solve");
    add_model_flags(bm);
    bm->add_option("--time", s.bm_time, "target clock time")->capture_default_str();
    bm->add_option("--paths", s.paths, "Monte Carlo paths")->capture_default_str();
    bm->add_option("--seed", s.seed, "rng seed")->required();
    tol_option(bm, "bm-check");
    bm->callback([&] {
        s.has_seed = true;
        execute("bm-check");
    });

    auto* conv = app.add_subcommand("convexify",
                                    "build a convexifying weight for the disc complement");
    add_model_flags(conv);
    conv->add_option("--disc-radius", s.disc_radius, "removed disc radius")->capture_default_str();
    conv->add_option("--r0", s.conv_r0, "profile radius")->capture_default_str();
    conv->add_option("--K", s.conv_K, "comparison curvature bound")->capture_default_str();
    conv->add_option("--N", s.conv_N, "comparison dimension bound")->capture_default_str();
    conv->add_option("--lp", s.conv_lp, "convexity deficit l' < 0 (0 = default -1.1/R)")
        ->capture_default_str();
    conv->add_option("--pairs", s.pairs, "certificate pair samples")->capture_default_str();
    conv->add_option("--seed", s.seed, "rng seed")->required();
    tol_option(conv, "convexify");
    conv->callback([&] {
        s.has_seed = true;
        execute("convexify");
    });
    // convexify needs a 2-D chart; swap the default model before its flags parse
    conv->preparse_callback([&](std::size_t) { s.model = "flat_t2"; });

    auto* sweep = app.add_subcommand("sweep-inequalities",
                                     "randomized matrix inequality and quartic form sweeps");
    add_model_flags(sweep);
    sweep->add_option("--count", s.sweep_count, "samples per (n, N') cell")->capture_default_str();
    sweep->add_option("--seed", s.seed, "rng seed")->required();
    tol_option(sweep, "sweeps");
    sweep->callback([&] {
        s.has_seed = true;
        execute("sweeps");
    });

    auto* runcmd = app.add_subcommand("run", "execute a scenario config file");
    runcmd->add_option("config", config_path, "key = value scenario file")->required();
    runcmd->callback([&] {
        const gammatc::Scenario parsed = gammatc::parse_config(config_path);
        exit_code = report_and_code(gammatc::run(parsed));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "verification aborted: %s\n", e.what());
        return 1;
    }
    return exit_code;
}
