#include "gammatc/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gammatc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Triangle-wave polar chart of the sphere band: theta runs from
// pi/2 - A up to pi/2 + A and back across one period, so the chart is
// periodic and double-covers the band.  The polar slope is constant in
// magnitude, hence g_yy is constant and g_xx = sin^2 theta is continuous;
// only the derivative of g_xx kinks at the two turning rows.
struct BandChart {
    double amplitude = 0.5;
    double period = 1.0;

    double theta(double y) const {
        const double f = y / period - std::floor(y / period); // in [0,1)
        const double tri = f < 0.5 ? 4.0 * f - 1.0 : 3.0 - 4.0 * f; // -1 -> 1 -> -1
        return 0.5 * M_PI + amplitude * tri;
    }
};

ModelSpace sphere_band(int resolution) {
    const double h = kTwoPi / resolution;
    const int rows = 2 * std::max(4, resolution / 6); // turning rows at 0 and rows/2
    const double ly = rows * h;
    BandChart chart{0.5, ly};

    ModelSpace m;
    m.name = "sphere_band";
    m.mesh = build_torus_mesh(resolution, rows, kTwoPi, ly);
    const double slope = 4.0 * chart.amplitude / ly;
    m.metric = sample_metric(m.mesh, [&](const std::array<double, 2>& x) {
        const double st = std::sin(chart.theta(x[1]));
        return std::array<double, 3>{st * st, 0.0, slope * slope};
    });
    m.V0 = zero_field(m.mesh);
    m.N = DimensionBound::finite(2.0);

    // Stencilled derivatives reach 4 rows; exclude 6 on each side of the
    // two kinks for margin.
    m.eligible.assign(m.mesh->node_count(), 1);
    const int half = rows / 2;
    for (int i = 0; i < m.mesh->node_count(); ++i) {
        const int j = m.mesh->indices(i)[1];
        const int d0 = std::min(j, rows - j);
        const int dh = std::abs(j - half);
        if (std::min(d0, dh) <= 6) m.eligible[i] = 0;
    }
    return m;
}

} // namespace

ModelSpace make_model(const std::string& id, int resolution) {
    if (resolution < 16)
        throw std::invalid_argument("make_model: resolution below 16 leaves no room for stencils");
    if (id == "flat_s1") {
        ModelSpace m;
        m.name = id;
        m.mesh = build_circle_mesh(resolution, kTwoPi);
        m.metric = sample_metric(m.mesh, [](const std::array<double, 2>&) {
            return std::array<double, 3>{1.0, 0.0, 0.0};
        });
        m.V0 = zero_field(m.mesh);
        m.N = DimensionBound::finite(2.0);
        return m;
    }
    if (id == "flat_t2") {
        ModelSpace m;
        m.name = id;
        m.mesh = build_torus_mesh(resolution, resolution, kTwoPi, kTwoPi);
        m.metric = sample_metric(m.mesh, [](const std::array<double, 2>&) {
            return std::array<double, 3>{1.0, 0.0, 1.0};
        });
        m.V0 = sample_scalar(m.mesh,
                             [](const std::array<double, 2>& x) { return 0.2 * std::cos(x[0]); });
        m.N = DimensionBound::finite(3.0);
        return m;
    }
    if (id == "sphere_band") return sphere_band(resolution);
    if (id == "conformal_t2") {
        ModelSpace m;
        m.name = id;
        m.mesh = build_torus_mesh(resolution, resolution, kTwoPi, kTwoPi);
        m.metric = sample_metric(m.mesh, [](const std::array<double, 2>& x) {
            const double s = std::exp(2.0 * 0.05 * (std::cos(x[0]) + std::cos(x[1])));
            return std::array<double, 3>{s, 0.0, s};
        });
        m.V0 = zero_field(m.mesh);
        m.N = DimensionBound::finite(2.0);
        return m;
    }
    throw std::invalid_argument("make_model: unknown model id '" + id +
                                "' (valid: flat_s1, flat_t2, sphere_band, conformal_t2)");
}

std::vector<std::string> model_ids() {
    return {"flat_s1", "flat_t2", "sphere_band", "conformal_t2"};
}

ScalarField make_weight(const MeshPtr& mesh, const std::string& id, double amplitude) {
    if (id == "zero") return zero_field(mesh);
    if (id == "const") return constant_field(mesh, amplitude);
    if (id == "harmonic") {
        const double k = kTwoPi / mesh->length[0];
        return sample_scalar(
            mesh, [&](const std::array<double, 2>& x) { return amplitude * std::cos(k * x[0]); });
    }
    throw std::invalid_argument("make_weight: unknown weight id '" + id +
                                "' (valid: zero, const, harmonic)");
}

std::vector<std::string> weight_ids() { return {"zero", "const", "harmonic"}; }

} // namespace gammatc
