#ifndef GAMMATC_SMOOTH_ORACLE_HPP
#define GAMMATC_SMOOTH_ORACLE_HPP

#include "gammatc/dimension.hpp"
#include "gammatc/mesh.hpp"

#include <Eigen/Dense>
#include <vector>

namespace gammatc {

// Smooth-side differential geometry by finite differences of sampled
// fields.  This is the independent oracle: nothing here reuses the
// transformation formula for curvature bounds under conformal change /
// time change — curvature of a transformed metric is recomputed from its
// raw components.
//
// All derivatives use centered fourth-order stencils (width 5, periodic
// wrap).  Error analysis on the sphere-band chart shows second-order
// stencils leave O(1e-3) curvature error at h = 2pi/256, which would
// swamp the 1e-4 defect tolerances this oracle must certify; fourth
// order brings it to O(1e-6).

// Fourth-order first/second/mixed partials of a node-indexed quantity.
double fd_partial(const ScalarField& f, int node, int axis);
double fd_second(const ScalarField& f, int node, int axis);
double fd_mixed(const ScalarField& f, int node); // d^2/dxdy, 2-D only

// Christoffel symbols Gamma^k_{ij} at a node, gam[k][i][j], symmetric in (i,j).
struct ChristoffelSymbols {
    double gam[2][2][2] = {};
};
ChristoffelSymbols christoffel(const MetricField& metric, int node);

// Ricci tensor at a node, symmetrized.  The raw finite-difference output
// has an antisymmetric residual of size O(h^4); ricci_asymmetry reports it.
Eigen::Matrix2d ricci(const MetricField& metric, int node);
double ricci_asymmetry(const MetricField& metric, int node);

// Covariant Hessian (Hess V)_ij = d_i d_j V - Gamma^k_{ij} d_k V.
Eigen::Matrix2d scalar_hessian(const MetricField& metric, const ScalarField& V, int node);

// T = Ric + Hess V - dV (x) dV / (N - n); the last term is 0 for N = infinity
// and is dropped for N = n, which requires V constant.
Eigen::Matrix2d bakry_emery_tensor(const MetricField& metric, const ScalarField& V,
                                   DimensionBound N, int node);

// Pointwise minimum eigenvalue of T relative to g (smallest lambda with
// det(T - lambda g) = 0), via closed-form 1x1 / 2x2 solves.
ScalarField optimal_k(const MetricField& metric, const ScalarField& V, DimensionBound N);

// Conformal change g' = e^{2w} g with matching density exponent
// V' = V0 + (n-2) w, so that e^{-V'} vol_{g'} = e^{2w} e^{-V0} vol_g.
std::pair<MetricField, ScalarField> conformal_data(const MetricField& metric,
                                                   const ScalarField& V0, const ScalarField& w);

// Smooth-side field helpers (all finite differences):
//   metric_gamma(a,b) = g^{ij} d_i a d_j b
//   weighted_laplacian(V,f) = tr_g Hess f - g^{ij} d_i V d_j f
ScalarField metric_gamma(const MetricField& metric, const ScalarField& a, const ScalarField& b);
ScalarField weighted_laplacian(const MetricField& metric, const ScalarField& V,
                               const ScalarField& f);

// Defect of the dimensional Bochner refinement at each node:
//   Gamma2-density - [ k Gamma(f) + |Hess f|_HS^2 + (tr Hess f - Delta f)^2/(N-n) ]
// with k = optimal_k(g,V,N) and Gamma2-density = 1/2 Delta_V Gamma(f) -
// Gamma(f, Delta_V f).  The trace term is taken 0 when N = n (V constant).
ScalarField improved_bochner_check(const MetricField& metric, const ScalarField& V,
                                   DimensionBound N, const ScalarField& f);

// Transformed-bound prediction field
//   e^{-2w} [ k - coefficient(N,N') grad_w_sq - lap_w ],
// where lap_w must be the weighted Laplacian of w w.r.t. the base (g, V0).
// Rejects N' <= N, quoting the admissible open interval (N, infinity].
ScalarField predicted_kprime(const ScalarField& k, DimensionBound N, DimensionBound Nprime,
                             const ScalarField& w, const ScalarField& grad_w_sq,
                             const ScalarField& lap_w);

struct CurvatureReport {
    MeshPtr mesh;
    Eigen::VectorXd kprime_pred;
    Eigen::VectorXd k_oracle;
    Eigen::VectorXd defect; // k_oracle - kprime_pred
    std::vector<std::uint8_t> eligible;
    double tolerance = 0.0;
    double min_defect = 0.0; // over eligible nodes
    int argmin_node = -1;
    bool pass = false;
};

struct TheoremBOptions {
    double tolerance = 1e-4;
    // Nodes to include in the verdict; empty = all.  Charts that are
    // periodified artificially (the sphere band) exclude a few columns
    // around the seam where the sampled metric is not smooth.
    std::vector<std::uint8_t> eligible;
};

// Two-sided check of the transformed curvature bound: the prediction uses
// the base curvature plus the weight's gradient/Laplacian; the oracle side
// recomputes curvature from the raw components of e^{2w}g.  Passes iff
// k_oracle >= kprime_pred - tolerance at every eligible node.
CurvatureReport verify_theorem_B(const MetricField& metric, const ScalarField& V0,
                                 DimensionBound N, const ScalarField& w, DimensionBound Nprime,
                                 const TheoremBOptions& opts = {});

} // namespace gammatc

#endif
