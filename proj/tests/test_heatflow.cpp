#include "gammatc/heatflow.hpp"
#include "gammatc/dirichlet.hpp"
#include "gammatc/models.hpp"
#include "gammatc/rng.hpp"

#include "doctest.h"

#include <cmath>
#include <stdexcept>

using namespace gammatc;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

Generator flat_circle(int n) {
    auto mesh = build_circle_mesh(n, kTau);
    auto metric = sample_metric(mesh, [](const std::array<double, 2>&) {
        return std::array<double, 3>{1.0, 0.0, 0.0};
    });
    return assemble_generator(mesh, metric, zero_field(mesh));
}

ScalarField cos_field(const MeshPtr& mesh, int k = 1) {
    return sample_scalar(mesh, [k](const std::array<double, 2>& x) { return std::cos(k * x[0]); });
}

} // namespace

TEST_CASE("crank-nicolson on an exact eigenvector matches the per-step factor") {
    const int n = 64;
    auto gen = flat_circle(n);
    const double h = gen.mesh->spacing[0];
    const double lambda = (2.0 - 2.0 * std::cos(h)) / (h * h); // discrete eigenvalue of cos
    auto f0 = cos_field(gen.mesh);

    const double t = 0.7;
    const int steps = 140;
    const auto solve = heat_solve(gen, f0, t, steps);
    const double a = 0.5 * (t / steps) * lambda;
    const double factor = std::pow((1.0 - a) / (1.0 + a), steps);
    const auto& u = solve.final_state();
    for (int i = 0; i < n; ++i)
        CHECK(u[i] == doctest::Approx(factor * f0[i]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("solver conserves mass and respects the maximum principle") {
    auto model = make_model("conformal_t2", 24);
    auto gen = assemble_generator(model.mesh, model.metric, model.V0);
    CounterRng rng(4, 0);
    ScalarField f0 = zero_field(model.mesh);
    for (int i = 0; i < f0.size(); ++i) f0[i] = rng.uniform();
    const auto solve = heat_solve(gen, f0, 0.5, 200);
    const auto& u = solve.final_state();
    CHECK(gen.measure.dot(u) ==
          doctest::Approx(gen.measure.dot(f0.values)).epsilon(1e-12));
    CHECK(u.minCoeff() >= f0.values.minCoeff() - 1e-6);
    CHECK(u.maxCoeff() <= f0.values.maxCoeff() + 1e-6);
}

TEST_CASE("record times must sit on the step grid") {
    auto gen = flat_circle(32);
    auto f0 = cos_field(gen.mesh);
    const auto solve = heat_solve(gen, f0, 1.0, 100, {0.25, 0.5});
    CHECK_NOTHROW((void)solve.at_time(0.25));
    CHECK_NOTHROW((void)solve.at_time(0.5));
    CHECK_NOTHROW((void)solve.at_time(1.0));
    CHECK_THROWS_AS((void)solve.at_time(0.33), std::invalid_argument);
    CHECK_THROWS_AS((void)heat_solve(gen, f0, 1.0, 100, {0.255}), std::invalid_argument);
}

TEST_CASE("composed solves equal one longer solve with the same step size") {
    auto gen = flat_circle(48);
    auto f0 = cos_field(gen.mesh, 2);
    const auto once = heat_solve(gen, f0, 0.6, 60);
    const auto first = heat_solve(gen, f0, 0.2, 20);
    ScalarField mid = f0;
    mid.values = first.final_state();
    const auto second = heat_solve(gen, mid, 0.4, 40);
    const double scale = once.final_state().cwiseAbs().maxCoeff();
    CHECK((once.final_state() - second.final_state()).cwiseAbs().maxCoeff() <= 1e-12 * scale);
}

TEST_CASE("dense exponential reference agrees with fine crank-nicolson") {
    auto gen = flat_circle(40);
    CounterRng rng(11, 0);
    ScalarField f0 = zero_field(gen.mesh);
    for (int i = 0; i < f0.size(); ++i) f0[i] = rng.normal();
    const auto ref = expm_reference(gen, f0, 0.3);
    const auto cn = heat_solve(gen, f0, 0.3, 4000).final_state();
    CHECK((ref - cn).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("gradient estimate on the flat circle with w = 0") {
    auto gen = flat_circle(128);
    auto pair = time_change(gen, zero_field(gen.mesh));
    auto f = cos_field(gen.mesh);
    GradientEstimateOptions opts;
    opts.steps_per_unit_time = 1000;
    opts.record_fields = true;
    const auto rep = gradient_estimate_check(pair, 0.0, DimensionBound::infinite(), f,
                                             {0.1, 0.5}, opts);
    CHECK(rep.times.size() == 2);
    CHECK(rep.pass(5e-4));
    // commutation defect against the closed form at t = 0.5:
    // P_t Gamma(f) - Gamma(P_t f) = 1/2 - e^{-4t}/2 cos(2x) - e^{-2t} sin^2(x)
    const auto& field = rep.defect_fields[1];
    double max_err = 0.0;
    for (int i = 0; i < field.size(); ++i) {
        const double x = gen.mesh->coord(i)[0];
        const double want = 0.5 - 0.5 * std::exp(-2.0) * std::cos(2.0 * x) -
                            std::exp(-1.0) * std::sin(x) * std::sin(x);
        max_err = std::max(max_err, std::abs(field[i] - want));
    }
    CHECK(max_err < 2e-3); // h^2 floor at n = 128
}

TEST_CASE("gradient estimate fails for an overclaimed curvature bound") {
    auto gen = flat_circle(128);
    auto w = make_weight(gen.mesh, "harmonic", 0.1);
    auto pair = time_change(gen, w);
    auto f = cos_field(gen.mesh);
    // the true bound is about -0.122; claiming +0.5 must be caught
    const auto rep = gradient_estimate_check(pair, 0.5, DimensionBound::infinite(), f, {0.5});
    CHECK_FALSE(rep.pass(1e-4));
}

TEST_CASE("walk endpoints replay bit for bit and respect the clock") {
    auto gen = flat_circle(64);
    auto w = make_weight(gen.mesh, "harmonic", 0.2);
    const auto a = simulate_time_changed_bm(gen, w, 5, 0.3, 400, 99);
    const auto b = simulate_time_changed_bm(gen, w, 5, 0.3, 400, 99);
    CHECK(a.endpoints == b.endpoints);
    CHECK(a.steps_taken == b.steps_taken);
    for (int p = 0; p < a.n_paths; ++p) CHECK(a.final_sigma[static_cast<std::size_t>(p)] >= 0.3);
}

TEST_CASE("constant weight is exactly a deterministic clock change") {
    auto gen = flat_circle(64);
    const double c = 0.25;
    auto wc = make_weight(gen.mesh, "const", c);
    auto w0 = zero_field(gen.mesh);
    // same embedded jump chain, clock scaled by e^{2c}: stopping at t under
    // w = c visits exactly the node reached at t e^{-2c} under w = 0
    const double t = 0.4;
    const auto with_w = simulate_time_changed_bm(gen, wc, 11, t, 300, 4242);
    const auto plain = simulate_time_changed_bm(gen, w0, 11, t * std::exp(-2.0 * c), 300, 4242);
    CHECK(with_w.endpoints == plain.endpoints);
}

TEST_CASE("feynman-kac closes the loop between walk and solver") {
    auto gen = flat_circle(64);
    auto w = make_weight(gen.mesh, "harmonic", 0.2);
    auto f = cos_field(gen.mesh);
    const auto rep = feynman_kac_check(gen, w, f, 0, 0.2, 20000, 31337, 800);
    CHECK(rep.pass);
    CHECK(rep.n_paths == 20000);
    CHECK(rep.mc_stderr > 0.0);
    CHECK(rep.z_score <= 3.0);

    // constant data short-circuits to the exact comparison
    const auto deg = feynman_kac_check(gen, w, constant_field(gen.mesh, 2.0), 0, 0.1, 50, 7, 100);
    CHECK(deg.degenerate);
    CHECK(deg.pass);
}
