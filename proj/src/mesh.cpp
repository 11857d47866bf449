#include "gammatc/mesh.hpp"

#include <cmath>

namespace gammatc {

namespace {

void check_axis(int n, double len, const char* axis) {
    if (n < 8)
        throw std::invalid_argument(std::string("mesh: need at least 8 nodes per axis, got ") +
                                    std::to_string(n) + " on " + axis);
    if (!(len > 0.0) || !std::isfinite(len))
        throw std::invalid_argument(std::string("mesh: period must be positive and finite on ") + axis);
}

} // namespace

MeshPtr build_circle_mesh(int n, double circumference) {
    check_axis(n, circumference, "x");
    auto m = std::make_shared<Mesh>();
    m->dim = 1;
    m->shape = {n, 1};
    m->length = {circumference, 0.0};
    m->spacing = {circumference / n, 0.0};
    return m;
}

MeshPtr build_torus_mesh(int nx, int ny, double lx, double ly) {
    check_axis(nx, lx, "x");
    check_axis(ny, ly, "y");
    auto m = std::make_shared<Mesh>();
    m->dim = 2;
    m->shape = {nx, ny};
    m->length = {lx, ly};
    m->spacing = {lx / nx, ly / ny};
    return m;
}

ScalarField sample_scalar(const MeshPtr& mesh, const ScalarFn& fn) {
    ScalarField f{mesh, Eigen::VectorXd(mesh->node_count())};
    for (int i = 0; i < f.size(); ++i) {
        const double v = fn(mesh->coord(i));
        if (!std::isfinite(v))
            throw std::runtime_error("sample_scalar: non-finite value at node " + std::to_string(i));
        f.values[i] = v;
    }
    return f;
}

MetricField sample_metric(const MeshPtr& mesh, const MetricFn& fn) {
    const int ncomp = mesh->dim == 1 ? 1 : 3;
    MetricField g{mesh, Eigen::MatrixXd(mesh->node_count(), ncomp)};
    for (int i = 0; i < mesh->node_count(); ++i) {
        const auto c = fn(mesh->coord(i));
        for (int k = 0; k < ncomp; ++k) {
            if (!std::isfinite(c[k]))
                throw std::runtime_error("sample_metric: non-finite component at node " +
                                         std::to_string(i));
            g.comps(i, k) = c[k];
        }
        // eigenvalue floor: reject metrics that are numerically degenerate
        if (mesh->dim == 1) {
            if (c[0] < MetricField::eps_pd)
                throw std::runtime_error("sample_metric: metric not positive definite at node " +
                                         std::to_string(i));
        } else {
            const double tr = c[0] + c[2];
            const double det = c[0] * c[2] - c[1] * c[1];
            const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
            const double lam_min = tr / 2.0 - disc;
            if (lam_min < MetricField::eps_pd)
                throw std::runtime_error("sample_metric: metric not positive definite at node " +
                                         std::to_string(i) + " (min eigenvalue " +
                                         std::to_string(lam_min) + ")");
        }
    }
    return g;
}

ScalarField zero_field(const MeshPtr& mesh) {
    return ScalarField{mesh, Eigen::VectorXd::Zero(mesh->node_count())};
}

ScalarField constant_field(const MeshPtr& mesh, double value) {
    return ScalarField{mesh, Eigen::VectorXd::Constant(mesh->node_count(), value)};
}

} // namespace gammatc
