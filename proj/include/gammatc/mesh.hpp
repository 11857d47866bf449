#ifndef GAMMATC_MESH_HPP
#define GAMMATC_MESH_HPP

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

namespace gammatc {

// Uniform periodic grid on a circle (dim 1) or flat-chart torus (dim 2).
// Periodicity is the only boundary treatment in this toolkit: every stencil
// wraps, so there are no one-sided differences anywhere.
struct Mesh {
    int dim = 1;
    std::array<int, 2> shape{1, 1};      // nodes per axis; shape[1] == 1 in 1-D
    std::array<double, 2> length{0, 0};  // period per axis
    std::array<double, 2> spacing{0, 0}; // length[a] / shape[a]

    int node_count() const { return shape[0] * shape[1]; }

    // Row-major node id from (possibly out-of-range) axis indices; wraps.
    int node_at(int ix, int iy = 0) const {
        ix %= shape[0];
        if (ix < 0) ix += shape[0];
        iy %= shape[1];
        if (iy < 0) iy += shape[1];
        return iy * shape[0] + ix;
    }

    std::array<int, 2> indices(int node) const {
        return {node % shape[0], node / shape[0]};
    }

    // Chart coordinate of a node; second entry is 0 in 1-D.
    std::array<double, 2> coord(int node) const {
        const auto ij = indices(node);
        return {ij[0] * spacing[0], dim == 2 ? ij[1] * spacing[1] : 0.0};
    }

    // Shortest periodic displacement from node a to node b, axis by axis.
    std::array<double, 2> displacement(int a, int b) const {
        const auto ia = indices(a), ib = indices(b);
        std::array<double, 2> d{0, 0};
        for (int ax = 0; ax < dim; ++ax) {
            double t = (ib[ax] - ia[ax]) * spacing[ax];
            const double L = length[ax];
            t -= L * std::floor(t / L + 0.5);
            d[ax] = t;
        }
        return d;
    }

    std::size_t cell_volume_exponent() const { return dim; }
    // Flat chart volume of one grid cell.
    double cell_volume() const { return dim == 2 ? spacing[0] * spacing[1] : spacing[0]; }
};

using MeshPtr = std::shared_ptr<const Mesh>;

MeshPtr build_circle_mesh(int n, double circumference);
MeshPtr build_torus_mesh(int nx, int ny, double lx, double ly);

// Per-node scalar values on a mesh.
struct ScalarField {
    MeshPtr mesh;
    Eigen::VectorXd values;

    double operator[](int i) const { return values[i]; }
    double& operator[](int i) { return values[i]; }
    int size() const { return static_cast<int>(values.size()); }
};

// Per-node symmetric metric tensor, packed storage:
//   dim 1: [g11];  dim 2: [g11, g12, g22].
// Validated at construction: finite entries and eigenvalues >= eps_pd.
struct MetricField {
    static constexpr double eps_pd = 1e-10;

    MeshPtr mesh;
    Eigen::MatrixXd comps; // node_count x (1 or 3)

    int dim() const { return mesh->dim; }
    Eigen::Matrix2d tensor(int node) const {
        Eigen::Matrix2d g = Eigen::Matrix2d::Identity();
        if (mesh->dim == 1) {
            g(0, 0) = comps(node, 0);
        } else {
            g(0, 0) = comps(node, 0);
            g(0, 1) = g(1, 0) = comps(node, 1);
            g(1, 1) = comps(node, 2);
        }
        return g;
    }
    // Inverse metric at a node (closed form, 1x1 or 2x2).
    Eigen::Matrix2d inverse(int node) const {
        Eigen::Matrix2d gi = Eigen::Matrix2d::Identity();
        if (mesh->dim == 1) {
            gi(0, 0) = 1.0 / comps(node, 0);
        } else {
            const double a = comps(node, 0), b = comps(node, 1), c = comps(node, 2);
            const double det = a * c - b * b;
            gi(0, 0) = c / det;
            gi(0, 1) = gi(1, 0) = -b / det;
            gi(1, 1) = a / det;
        }
        return gi;
    }
    double det(int node) const {
        if (mesh->dim == 1) return comps(node, 0);
        return comps(node, 0) * comps(node, 2) - comps(node, 1) * comps(node, 1);
    }
    // sqrt(det g), the Riemannian density against the chart measure.
    double volume_density(int node) const { return std::sqrt(det(node)); }
};

using ScalarFn = std::function<double(const std::array<double, 2>&)>;
// Returns packed components, layout as in MetricField.
using MetricFn = std::function<std::array<double, 3>(const std::array<double, 2>&)>;

ScalarField sample_scalar(const MeshPtr& mesh, const ScalarFn& fn);
MetricField sample_metric(const MeshPtr& mesh, const MetricFn& fn);

ScalarField zero_field(const MeshPtr& mesh);
ScalarField constant_field(const MeshPtr& mesh, double value);

inline void require_same_mesh(const MeshPtr& a, const MeshPtr& b, const char* what) {
    if (a.get() != b.get())
        throw std::invalid_argument(std::string(what) + ": fields live on different meshes");
}

} // namespace gammatc

#endif
