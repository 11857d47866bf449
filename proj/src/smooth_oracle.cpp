#include "gammatc/smooth_oracle.hpp"

#include "gammatc/timechange.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gammatc {

namespace {

// Centered 4th-order stencils over any node-indexed accessor.  The mesh
// guarantees >= 8 nodes per axis, so the width-5 stencil never wraps onto
// itself.
template <class At>
double d1_axis(const Mesh& m, At&& at, int node, int axis) {
    const auto ij = m.indices(node);
    auto nb = [&](int s) {
        return axis == 0 ? m.node_at(ij[0] + s, ij[1]) : m.node_at(ij[0], ij[1] + s);
    };
    const double h = m.spacing[axis];
    return (at(nb(-2)) - 8.0 * at(nb(-1)) + 8.0 * at(nb(1)) - at(nb(2))) / (12.0 * h);
}

template <class At>
double d2_axis(const Mesh& m, At&& at, int node, int axis) {
    const auto ij = m.indices(node);
    auto nb = [&](int s) {
        return axis == 0 ? m.node_at(ij[0] + s, ij[1]) : m.node_at(ij[0], ij[1] + s);
    };
    const double h = m.spacing[axis];
    return (-at(nb(-2)) + 16.0 * at(nb(-1)) - 30.0 * at(node) + 16.0 * at(nb(1)) - at(nb(2))) /
           (12.0 * h * h);
}

template <class At>
double d_mixed(const Mesh& m, At&& at, int node) {
    const auto ij = m.indices(node);
    static constexpr int off[4] = {-2, -1, 1, 2};
    static constexpr double cf[4] = {1.0, -8.0, 8.0, -1.0};
    double acc = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            acc += cf[a] * cf[b] * at(m.node_at(ij[0] + off[a], ij[1] + off[b]));
    return acc / (144.0 * m.spacing[0] * m.spacing[1]);
}

int comp_index(int i, int j) { return i + j; } // (0,0)->0, (0,1)/(1,0)->1, (1,1)->2

ChristoffelSymbols christoffel_at(const MetricField& metric, int node) {
    const Mesh& m = *metric.mesh;
    const int dim = m.dim;
    // dg[l][i][j] = d_l g_ij
    double dg[2][2][2] = {};
    for (int l = 0; l < dim; ++l)
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) {
                const int c = dim == 1 ? 0 : comp_index(i, j);
                const double v =
                    d1_axis(m, [&](int q) { return metric.comps(q, c); }, node, l);
                dg[l][i][j] = dg[l][j][i] = v;
            }
    const Eigen::Matrix2d gi = metric.inverse(node);
    ChristoffelSymbols cs;
    for (int k = 0; k < dim; ++k)
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) {
                double acc = 0.0;
                for (int l = 0; l < dim; ++l)
                    acc += gi(k, l) * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                cs.gam[k][i][j] = cs.gam[k][j][i] = 0.5 * acc;
            }
    return cs;
}

using ChristoffelField = std::vector<ChristoffelSymbols>;

ChristoffelField christoffel_field(const MetricField& metric) {
    ChristoffelField out(metric.mesh->node_count());
    for (int i = 0; i < metric.mesh->node_count(); ++i) out[i] = christoffel_at(metric, i);
    return out;
}

// Ricci from a per-node Christoffel table:
//   R_ij = d_k G^k_ij - d_i G^k_kj + G^k_kl G^l_ij - G^k_il G^l_kj.
Eigen::Matrix2d ricci_raw(const Mesh& m, const ChristoffelField& cf, int node) {
    const int dim = m.dim;
    Eigen::Matrix2d R = Eigen::Matrix2d::Zero();
    if (dim == 1) return R; // no intrinsic curvature on a line
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            double v = 0.0;
            for (int k = 0; k < dim; ++k) {
                v += d1_axis(m, [&](int q) { return cf[q].gam[k][i][j]; }, node, k);
                v -= d1_axis(m, [&](int q) { return cf[q].gam[k][k][j]; }, node, i);
            }
            const auto& c0 = cf[node];
            for (int k = 0; k < dim; ++k)
                for (int l = 0; l < dim; ++l)
                    v += c0.gam[k][k][l] * c0.gam[l][i][j] - c0.gam[k][i][l] * c0.gam[l][k][j];
            R(i, j) = v;
        }
    return R;
}

Eigen::Matrix2d hessian_from(const Mesh& m, const ChristoffelSymbols& cs, const ScalarField& V,
                             int node) {
    const int dim = m.dim;
    auto at = [&](int q) { return V[q]; };
    double grad[2] = {};
    for (int a = 0; a < dim; ++a) grad[a] = d1_axis(m, at, node, a);
    Eigen::Matrix2d H = Eigen::Matrix2d::Zero();
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
            double v = (i == j) ? d2_axis(m, at, node, i) : d_mixed(m, at, node);
            for (int k = 0; k < dim; ++k) v -= cs.gam[k][i][j] * grad[k];
            H(i, j) = H(j, i) = v;
        }
    return H;
}

void require_constant(const ScalarField& V, const char* ctx) {
    const double lo = V.values.minCoeff(), hi = V.values.maxCoeff();
    if (hi - lo > 1e-12 * (1.0 + std::max(std::abs(lo), std::abs(hi))))
        throw std::invalid_argument(std::string(ctx) +
                                    ": N equals the chart dimension, which requires a constant "
                                    "density exponent; got range " +
                                    std::to_string(hi - lo));
}

Eigen::Matrix2d be_tensor_from(const Mesh& m, const ChristoffelField& cf, const ScalarField& V,
                               DimensionBound N, int node) {
    const int dim = m.dim;
    Eigen::Matrix2d T = ricci_raw(m, cf, node);
    T = 0.5 * (T + T.transpose().eval());
    T += hessian_from(m, cf[node], V, node);
    if (!N.is_infinite() && N.value() > dim) {
        auto at = [&](int q) { return V[q]; };
        double grad[2] = {};
        for (int a = 0; a < dim; ++a) grad[a] = d1_axis(m, at, node, a);
        const double inv = 1.0 / (N.value() - dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) T(i, j) -= grad[i] * grad[j] * inv;
    }
    return T;
}

double min_generalized_eig(const Eigen::Matrix2d& T, const MetricField& metric, int node) {
    if (metric.mesh->dim == 1) return T(0, 0) / metric.comps(node, 0);
    // Whiten by the Cholesky factor of g and solve the symmetric 2x2:
    // the discriminant becomes a sum of squares, so nearly-double
    // eigenvalues (T proportional to g, the generic situation in 2-D)
    // come out with full precision instead of a sqrt(eps) cancellation.
    const double a = metric.comps(node, 0), b = metric.comps(node, 1),
                 c = metric.comps(node, 2);
    const double det = a * c - b * b;
    if (!(a > 0.0) || !(det > 0.0))
        throw std::runtime_error("optimal_k: metric not positive definite at node " +
                                 std::to_string(node));
    const double s = std::sqrt(a);
    const double u = b / s;
    const double v = std::sqrt(det / a);
    // rows of L^{-1} for L = [[s, 0], [u, v]]
    const double i00 = 1.0 / s, i10 = -u / (s * v), i11 = 1.0 / v;
    const double p = i00 * T(0, 0) * i00;
    const double r = i00 * (T(0, 0) * i10 + T(0, 1) * i11);
    const double q = i10 * (T(0, 0) * i10 + T(0, 1) * i11) +
                     i11 * (T(1, 0) * i10 + T(1, 1) * i11);
    const double mid = 0.5 * (p + q);
    return mid - std::hypot(0.5 * (p - q), r);
}

void check_dimension_bound(const MetricField& metric, const ScalarField& V, DimensionBound N,
                           const char* ctx) {
    const int dim = metric.mesh->dim;
    if (!N.is_infinite()) {
        if (N.value() < dim)
            throw std::invalid_argument(std::string(ctx) + ": need N >= chart dimension " +
                                        std::to_string(dim));
        if (N.value() == static_cast<double>(dim)) require_constant(V, ctx);
    }
}

} // namespace

double fd_partial(const ScalarField& f, int node, int axis) {
    return d1_axis(*f.mesh, [&](int q) { return f[q]; }, node, axis);
}

double fd_second(const ScalarField& f, int node, int axis) {
    return d2_axis(*f.mesh, [&](int q) { return f[q]; }, node, axis);
}

double fd_mixed(const ScalarField& f, int node) {
    if (f.mesh->dim != 2)
        throw std::invalid_argument("fd_mixed: mixed partial needs a 2-D mesh");
    return d_mixed(*f.mesh, [&](int q) { return f[q]; }, node);
}

ChristoffelSymbols christoffel(const MetricField& metric, int node) {
    return christoffel_at(metric, node);
}

Eigen::Matrix2d ricci(const MetricField& metric, int node) {
    if (metric.mesh->dim == 1) return Eigen::Matrix2d::Zero();
    // Fresh Christoffel evaluations on the stencil; identical values to the
    // cached-field path used by the field-level routines.
    ChristoffelField local(metric.mesh->node_count());
    std::vector<char> have(metric.mesh->node_count(), 0);
    const auto ij = metric.mesh->indices(node);
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) {
            const int q = metric.mesh->node_at(ij[0] + a, ij[1] + b);
            if (!have[q]) {
                local[q] = christoffel_at(metric, q);
                have[q] = 1;
            }
        }
    const Eigen::Matrix2d R = ricci_raw(*metric.mesh, local, node);
    return 0.5 * (R + R.transpose().eval());
}

double ricci_asymmetry(const MetricField& metric, int node) {
    if (metric.mesh->dim == 1) return 0.0;
    ChristoffelField local(metric.mesh->node_count());
    std::vector<char> have(metric.mesh->node_count(), 0);
    const auto ij = metric.mesh->indices(node);
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) {
            const int q = metric.mesh->node_at(ij[0] + a, ij[1] + b);
            if (!have[q]) {
                local[q] = christoffel_at(metric, q);
                have[q] = 1;
            }
        }
    const Eigen::Matrix2d R = ricci_raw(*metric.mesh, local, node);
    return std::abs(R(0, 1) - R(1, 0));
}

Eigen::Matrix2d scalar_hessian(const MetricField& metric, const ScalarField& V, int node) {
    require_same_mesh(metric.mesh, V.mesh, "scalar_hessian");
    return hessian_from(*metric.mesh, christoffel_at(metric, node), V, node);
}

Eigen::Matrix2d bakry_emery_tensor(const MetricField& metric, const ScalarField& V,
                                   DimensionBound N, int node) {
    require_same_mesh(metric.mesh, V.mesh, "bakry_emery_tensor");
    check_dimension_bound(metric, V, N, "bakry_emery_tensor");
    ChristoffelField local(metric.mesh->node_count());
    std::vector<char> have(metric.mesh->node_count(), 0);
    const auto ij = metric.mesh->indices(node);
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) {
            const int q = metric.mesh->node_at(ij[0] + a, ij[1] + b);
            if (!have[q]) {
                local[q] = christoffel_at(metric, q);
                have[q] = 1;
            }
        }
    return be_tensor_from(*metric.mesh, local, V, N, node);
}

ScalarField optimal_k(const MetricField& metric, const ScalarField& V, DimensionBound N) {
    require_same_mesh(metric.mesh, V.mesh, "optimal_k");
    check_dimension_bound(metric, V, N, "optimal_k");
    const ChristoffelField cf = christoffel_field(metric);
    ScalarField k = zero_field(metric.mesh);
    for (int i = 0; i < metric.mesh->node_count(); ++i) {
        const Eigen::Matrix2d T = be_tensor_from(*metric.mesh, cf, V, N, i);
        k[i] = min_generalized_eig(T, metric, i);
    }
    return k;
}

std::pair<MetricField, ScalarField> conformal_data(const MetricField& metric,
                                                   const ScalarField& V0, const ScalarField& w) {
    require_same_mesh(metric.mesh, V0.mesh, "conformal_data");
    require_same_mesh(metric.mesh, w.mesh, "conformal_data");
    const int dim = metric.mesh->dim;
    MetricField g2{metric.mesh, metric.comps};
    for (int i = 0; i < metric.mesh->node_count(); ++i) {
        const double s = std::exp(2.0 * w[i]);
        for (int c = 0; c < g2.comps.cols(); ++c) g2.comps(i, c) *= s;
    }
    ScalarField v2{metric.mesh, V0.values + (dim - 2.0) * w.values};
    return {std::move(g2), std::move(v2)};
}

ScalarField metric_gamma(const MetricField& metric, const ScalarField& a, const ScalarField& b) {
    require_same_mesh(metric.mesh, a.mesh, "metric_gamma");
    require_same_mesh(metric.mesh, b.mesh, "metric_gamma");
    const Mesh& m = *metric.mesh;
    ScalarField out = zero_field(metric.mesh);
    for (int q = 0; q < m.node_count(); ++q) {
        const Eigen::Matrix2d gi = metric.inverse(q);
        double da[2] = {}, db[2] = {};
        for (int ax = 0; ax < m.dim; ++ax) {
            da[ax] = d1_axis(m, [&](int r) { return a[r]; }, q, ax);
            db[ax] = d1_axis(m, [&](int r) { return b[r]; }, q, ax);
        }
        double acc = 0.0;
        for (int i = 0; i < m.dim; ++i)
            for (int j = 0; j < m.dim; ++j) acc += gi(i, j) * da[i] * db[j];
        out[q] = acc;
    }
    return out;
}

ScalarField weighted_laplacian(const MetricField& metric, const ScalarField& V,
                               const ScalarField& f) {
    require_same_mesh(metric.mesh, V.mesh, "weighted_laplacian");
    require_same_mesh(metric.mesh, f.mesh, "weighted_laplacian");
    const Mesh& m = *metric.mesh;
    const ChristoffelField cf = christoffel_field(metric);
    ScalarField out = zero_field(metric.mesh);
    for (int q = 0; q < m.node_count(); ++q) {
        const Eigen::Matrix2d gi = metric.inverse(q);
        const Eigen::Matrix2d H = hessian_from(m, cf[q], f, q);
        double dv[2] = {}, df[2] = {};
        for (int ax = 0; ax < m.dim; ++ax) {
            dv[ax] = d1_axis(m, [&](int r) { return V[r]; }, q, ax);
            df[ax] = d1_axis(m, [&](int r) { return f[r]; }, q, ax);
        }
        double acc = 0.0;
        for (int i = 0; i < m.dim; ++i)
            for (int j = 0; j < m.dim; ++j) acc += gi(i, j) * (H(i, j) - dv[i] * df[j]);
        out[q] = acc;
    }
    return out;
}

ScalarField improved_bochner_check(const MetricField& metric, const ScalarField& V,
                                   DimensionBound N, const ScalarField& f) {
    require_same_mesh(metric.mesh, f.mesh, "improved_bochner_check");
    check_dimension_bound(metric, V, N, "improved_bochner_check");
    const Mesh& m = *metric.mesh;
    const int dim = m.dim;

    const ScalarField gf = metric_gamma(metric, f, f);
    const ScalarField lf = weighted_laplacian(metric, V, f);
    const ScalarField half_lap_gf = weighted_laplacian(metric, V, gf);
    const ScalarField gf_lf = metric_gamma(metric, f, lf);
    const ScalarField k = optimal_k(metric, V, N);

    const ChristoffelField cf = christoffel_field(metric);
    ScalarField defect = zero_field(metric.mesh);
    for (int q = 0; q < m.node_count(); ++q) {
        const Eigen::Matrix2d gi = metric.inverse(q);
        const Eigen::Matrix2d H = hessian_from(m, cf[q], f, q);
        const Eigen::Matrix2d Hup = gi * H * gi; // both indices raised once: |H|^2 = tr(Hup H)
        double hs2 = 0.0, trH = 0.0;
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) hs2 += Hup(i, j) * H(i, j);
            for (int j = 0; j < dim; ++j) trH += gi(i, j) * H(j, i);
        }
        double trace_term = 0.0;
        if (!N.is_infinite() && N.value() > dim) {
            const double excess = trH - lf[q];
            trace_term = excess * excess / (N.value() - dim);
        }
        const double gamma2_density = 0.5 * half_lap_gf[q] - gf_lf[q];
        defect[q] = gamma2_density - (k[q] * gf[q] + hs2 + trace_term);
    }
    return defect;
}

ScalarField predicted_kprime(const ScalarField& k, DimensionBound N, DimensionBound Nprime,
                             const ScalarField& w, const ScalarField& grad_w_sq,
                             const ScalarField& lap_w) {
    require_same_mesh(k.mesh, w.mesh, "predicted_kprime");
    require_same_mesh(k.mesh, grad_w_sq.mesh, "predicted_kprime");
    require_same_mesh(k.mesh, lap_w.mesh, "predicted_kprime");
    if (!(Nprime > N))
        throw std::invalid_argument(
            "predicted_kprime: N' must lie in the open interval (N, inf]; got N'=" +
            Nprime.str() + " with N=" + N.str());
    if (grad_w_sq.values.minCoeff() < 0.0)
        throw std::invalid_argument("predicted_kprime: grad_w_sq must be nonnegative");
    const double c = time_change_coefficient(N, Nprime);
    ScalarField out = zero_field(k.mesh);
    for (int i = 0; i < k.size(); ++i)
        out[i] = std::exp(-2.0 * w[i]) * (k[i] - c * grad_w_sq[i] - lap_w[i]);
    return out;
}

CurvatureReport verify_theorem_B(const MetricField& metric, const ScalarField& V0,
                                 DimensionBound N, const ScalarField& w, DimensionBound Nprime,
                                 const TheoremBOptions& opts) {
    require_same_mesh(metric.mesh, V0.mesh, "verify_theorem_B");
    require_same_mesh(metric.mesh, w.mesh, "verify_theorem_B");
    const int n_nodes = metric.mesh->node_count();
    if (!opts.eligible.empty() && static_cast<int>(opts.eligible.size()) != n_nodes)
        throw std::invalid_argument("verify_theorem_B: eligibility mask size mismatch");

    const ScalarField k = optimal_k(metric, V0, N);
    const ScalarField gw = metric_gamma(metric, w, w);
    const ScalarField lw = weighted_laplacian(metric, V0, w);
    const ScalarField pred = predicted_kprime(k, N, Nprime, w, gw, lw);

    const auto transformed = conformal_data(metric, V0, w);
    const ScalarField oracle = optimal_k(transformed.first, transformed.second, Nprime);

    CurvatureReport rep;
    rep.mesh = metric.mesh;
    rep.kprime_pred = pred.values;
    rep.k_oracle = oracle.values;
    rep.defect = oracle.values - pred.values;
    rep.eligible = opts.eligible.empty() ? std::vector<std::uint8_t>(n_nodes, 1) : opts.eligible;
    rep.tolerance = opts.tolerance;
    rep.min_defect = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_nodes; ++i) {
        if (!rep.eligible[i]) continue;
        if (rep.defect[i] < rep.min_defect) {
            rep.min_defect = rep.defect[i];
            rep.argmin_node = i;
        }
    }
    rep.pass = rep.min_defect >= -rep.tolerance;
    return rep;
}

} // namespace gammatc
