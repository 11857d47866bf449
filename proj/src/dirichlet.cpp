#include "gammatc/dirichlet.hpp"

#include <cmath>
#include <vector>

namespace gammatc {

namespace {

// Conductance tensor A = e^{-V0} sqrt(det g) g^{-1} per node, packed like the metric.
Eigen::MatrixXd conductance_tensor(const MetricField& metric, const ScalarField& v0) {
    const int n = metric.mesh->node_count();
    const int dim = metric.mesh->dim;
    Eigen::MatrixXd A(n, dim == 1 ? 1 : 3);
    for (int i = 0; i < n; ++i) {
        const double rho = std::exp(-v0[i]) * metric.volume_density(i);
        const Eigen::Matrix2d gi = metric.inverse(i);
        if (dim == 1) {
            A(i, 0) = rho * gi(0, 0);
        } else {
            A(i, 0) = rho * gi(0, 0);
            A(i, 1) = rho * gi(0, 1);
            A(i, 2) = rho * gi(1, 1);
        }
    }
    return A;
}

} // namespace

Generator assemble_generator(const MeshPtr& mesh, const MetricField& metric,
                             const ScalarField& log_density) {
    require_same_mesh(mesh, metric.mesh, "assemble_generator");
    require_same_mesh(mesh, log_density.mesh, "assemble_generator");

    const int n = mesh->node_count();
    const int dim = mesh->dim;
    const double hx = mesh->spacing[0];
    const double hy = dim == 2 ? mesh->spacing[1] : 1.0;
    const Eigen::MatrixXd A = conductance_tensor(metric, log_density);

    Eigen::VectorXd m(n);
    for (int i = 0; i < n; ++i)
        m[i] = std::exp(-log_density[i]) * metric.volume_density(i) * mesh->cell_volume();

    // Each undirected edge gets one conductance; the mixed metric term rides
    // on diagonal edges (NE/SW for positive A12, SE/NW for negative), and the
    // axis conductances give back the matching share so the stencil stays
    // second-order consistent.  A negative axis conductance means the metric
    // is too anisotropic for this grid.
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * (dim == 1 ? 3 : 9));
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);

    auto add_edge = [&](int i, int j, double c) {
        if (c == 0.0) return;
        trip.emplace_back(i, j, c / m[i]);
        trip.emplace_back(j, i, c / m[j]);
        diag[i] -= c / m[i];
        diag[j] -= c / m[j];
    };

    for (int iy = 0; iy < mesh->shape[1]; ++iy) {
        for (int ix = 0; ix < mesh->shape[0]; ++ix) {
            const int i = mesh->node_at(ix, iy);
            if (dim == 1) {
                const int j = mesh->node_at(ix + 1);
                const double c = 0.5 * (A(i, 0) + A(j, 0)) / hx;
                if (c < 0.0)
                    throw std::runtime_error("assemble_generator: negative coupling at node " +
                                             std::to_string(i));
                add_edge(i, j, c);
                continue;
            }
            const int e = mesh->node_at(ix + 1, iy);
            const int nn = mesh->node_at(ix, iy + 1);
            const int ne = mesh->node_at(ix + 1, iy + 1);
            const int se = mesh->node_at(ix + 1, iy - 1);

            const double cx = 0.5 * (A(i, 0) + A(e, 0)) * hy / hx -
                              0.5 * (std::abs(A(i, 1)) + std::abs(A(e, 1)));
            const double cy = 0.5 * (A(i, 2) + A(nn, 2)) * hx / hy -
                              0.5 * (std::abs(A(i, 1)) + std::abs(A(nn, 1)));
            const double cne = 0.5 * (std::max(A(i, 1), 0.0) + std::max(A(ne, 1), 0.0));
            const double cse = 0.5 * (std::max(-A(i, 1), 0.0) + std::max(-A(se, 1), 0.0));
            if (cx < 0.0 || cy < 0.0)
                throw std::runtime_error(
                    "assemble_generator: negative coupling at node " + std::to_string(i) +
                    " (metric too anisotropic for this grid; cx=" + std::to_string(cx) +
                    " cy=" + std::to_string(cy) + ")");
            add_edge(i, e, cx);
            add_edge(i, nn, cy);
            add_edge(i, ne, cne);
            add_edge(i, se, cse);
        }
    }
    for (int i = 0; i < n; ++i) trip.emplace_back(i, i, diag[i]);

    Generator gen;
    gen.mesh = mesh;
    gen.measure = std::move(m);
    gen.op.resize(n, n);
    gen.op.setFromTriplets(trip.begin(), trip.end());
    gen.op.makeCompressed();
    return gen;
}

void check_generator_invariants(const Generator& gen, double tol) {
    const auto& L = gen.op;
    const int n = gen.size();
    if (gen.measure.minCoeff() <= 0.0)
        throw std::runtime_error("generator: nonpositive measure weight");

    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(L.coeff(i, i)) * gen.measure[i]);
    if (scale == 0.0) scale = 1.0;

    for (int i = 0; i < n; ++i) {
        double rowsum = 0.0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(L, i); it; ++it) {
            rowsum += it.value();
            if (it.col() != i) {
                if (it.value() < 0.0)
                    throw std::runtime_error("generator: negative off-diagonal at node " +
                                             std::to_string(i));
                const double flux_ij = gen.measure[i] * it.value();
                const double flux_ji = gen.measure[it.col()] * L.coeff(it.col(), i);
                if (std::abs(flux_ij - flux_ji) > tol * scale)
                    throw std::runtime_error(
                        "generator: weighted symmetry violated on edge (" + std::to_string(i) +
                        "," + std::to_string(it.col()) + "): " + std::to_string(flux_ij) +
                        " vs " + std::to_string(flux_ji));
            }
        }
        if (std::abs(rowsum) * gen.measure[i] > tol * scale)
            throw std::runtime_error("generator: row sum " + std::to_string(rowsum) +
                                     " at node " + std::to_string(i));
    }
}

ScalarField apply_generator(const Generator& gen, const ScalarField& f) {
    require_same_mesh(gen.mesh, f.mesh, "apply_generator");
    return ScalarField{gen.mesh, gen.op * f.values};
}

ScalarField carre_du_champ(const Generator& gen, const ScalarField& f, const ScalarField& g) {
    require_same_mesh(gen.mesh, f.mesh, "carre_du_champ");
    require_same_mesh(gen.mesh, g.mesh, "carre_du_champ");
    ScalarField out = zero_field(gen.mesh);
    for (int i = 0; i < gen.size(); ++i) {
        double acc = 0.0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(gen.op, i); it; ++it) {
            const int j = static_cast<int>(it.col());
            if (j == i) continue;
            acc += it.value() * (f[j] - f[i]) * (g[j] - g[i]);
        }
        out[i] = 0.5 * acc;
    }
    return out;
}

ScalarField carre_du_champ(const Generator& gen, const ScalarField& f) {
    return carre_du_champ(gen, f, f);
}

double integrate(const Generator& gen, const ScalarField& f) {
    require_same_mesh(gen.mesh, f.mesh, "integrate");
    return gen.measure.dot(f.values);
}

double dirichlet_energy(const Generator& gen, const ScalarField& f) {
    return integrate(gen, carre_du_champ(gen, f));
}

double gamma2_form(const Generator& gen, const ScalarField& f, const ScalarField& phi) {
    const ScalarField lf = apply_generator(gen, f);
    const ScalarField lphi = apply_generator(gen, phi);
    const ScalarField gf = carre_du_champ(gen, f);
    const ScalarField gflf = carre_du_champ(gen, f, lf);
    double out = 0.0;
    for (int i = 0; i < gen.size(); ++i)
        out += gen.measure[i] * (0.5 * gf[i] * lphi[i] - gflf[i] * phi.values[i]);
    return out;
}

double be_defect(const Generator& gen, const ScalarField& k, DimensionBound N,
                 const ScalarField& f, const ScalarField& phi) {
    require_same_mesh(gen.mesh, k.mesh, "be_defect");
    for (int i = 0; i < phi.size(); ++i)
        if (phi[i] < 0.0)
            throw std::invalid_argument("be_defect: test function negative at node " +
                                        std::to_string(i));
    const double invN = N.reciprocal();
    const ScalarField gf = carre_du_champ(gen, f);
    const ScalarField lf = apply_generator(gen, f);
    double rhs = 0.0;
    for (int i = 0; i < gen.size(); ++i)
        rhs += gen.measure[i] * phi[i] * (k[i] * gf[i] + invN * lf[i] * lf[i]);
    return gamma2_form(gen, f, phi) - rhs;
}

ScalarField hessian_via_gamma(const Generator& gen, const ScalarField& f,
                              const ScalarField& g, const ScalarField& h) {
    const ScalarField gfh = carre_du_champ(gen, f, h);
    const ScalarField gfg = carre_du_champ(gen, f, g);
    const ScalarField ggh = carre_du_champ(gen, g, h);
    const ScalarField t1 = carre_du_champ(gen, g, gfh);
    const ScalarField t2 = carre_du_champ(gen, h, gfg);
    const ScalarField t3 = carre_du_champ(gen, f, ggh);
    return ScalarField{gen.mesh, 0.5 * (t1.values + t2.values - t3.values)};
}

TimeChangedPair time_change(const Generator& gen, const ScalarField& w) {
    require_same_mesh(gen.mesh, w.mesh, "time_change");
    const double wmax = w.values.cwiseAbs().maxCoeff();
    if (wmax > 350.0)
        throw std::invalid_argument("time_change: |w| up to " + std::to_string(wmax) +
                                    " would overflow e^{2w}; rescale the weight");
    const int n = gen.size();
    Eigen::VectorXd shrink(n), grow(n);
    for (int i = 0; i < n; ++i) {
        shrink[i] = std::exp(-2.0 * w[i]);
        grow[i] = std::exp(2.0 * w[i]);
    }
    Generator changed;
    changed.mesh = gen.mesh;
    changed.op = shrink.asDiagonal() * gen.op;
    changed.measure = gen.measure.cwiseProduct(grow);
    check_generator_invariants(changed);
    return TimeChangedPair{gen, w, std::move(changed)};
}

double sqrt_gamma_energy_check(const Generator& gen, double K, const ScalarField& f) {
    const ScalarField gf = carre_du_champ(gen, f);
    const double gmax = gf.values.maxCoeff();
    ScalarField root = zero_field(gen.mesh);
    if (gmax > 0.0) {
        const double eps = 1e-8 * gmax;
        for (int i = 0; i < gf.size(); ++i)
            root[i] = std::sqrt(gf[i] + eps * eps) - eps;
    }
    const ScalarField lf = apply_generator(gen, f);
    double lf_sq = 0.0;
    for (int i = 0; i < gen.size(); ++i) lf_sq += gen.measure[i] * lf[i] * lf[i];
    return lf_sq - K * dirichlet_energy(gen, f) - dirichlet_energy(gen, root);
}

} // namespace gammatc
