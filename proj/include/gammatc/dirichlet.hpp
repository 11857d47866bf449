#ifndef GAMMATC_DIRICHLET_HPP
#define GAMMATC_DIRICHLET_HPP

#include "gammatc/dimension.hpp"
#include "gammatc/mesh.hpp"

#include <Eigen/Sparse>

namespace gammatc {

// Markovian generator of a Dirichlet form on mesh nodes.
//
//   L f(i) = (1/m_i) sum_j c_ij (f_j - f_i),  c_ij = c_ji >= 0,
//
// assembled so that diag(m) L is symmetric, row sums vanish and all
// off-diagonal entries are nonnegative.  Those three structural facts are
// what every identity in this module leans on; they hold at the matrix
// level, not merely in the h -> 0 limit.
struct Generator {
    MeshPtr mesh;
    Eigen::SparseMatrix<double, Eigen::RowMajor> op; // L
    Eigen::VectorXd measure;                         // m_i > 0

    int size() const { return static_cast<int>(measure.size()); }
};

// Base generator, weight, and the time-changed generator
// L' = e^{-2w} L with measure m' = e^{2w} m.
struct TimeChangedPair {
    Generator base;
    ScalarField w;
    Generator changed;
};

// Second-order finite-volume weighted Laplacian  Delta_g - g(grad V0, grad .)
// with reversible measure density e^{-V0} sqrt(det g).  Throws if the metric
// is too anisotropic for the grid to keep the stencil Markovian (a negative
// off-diagonal coupling), naming the offending node.
Generator assemble_generator(const MeshPtr& mesh, const MetricField& metric,
                             const ScalarField& log_density);

// Structural invariants, checked against a relative tolerance; throws on
// violation with the worst offender in the message.
void check_generator_invariants(const Generator& gen, double tol = 1e-12);

ScalarField apply_generator(const Generator& gen, const ScalarField& f);

// Gamma(f,g) = (1/2)(L(fg) - f Lg - g Lf), evaluated edge-wise:
//   Gamma(f,g)_i = (1/2) sum_j L_ij (f_j - f_i)(g_j - g_i),
// which is the same expression after cancelling the row sums, but keeps
// Gamma(f,f) >= 0 exact in floating point.
ScalarField carre_du_champ(const Generator& gen, const ScalarField& f, const ScalarField& g);
ScalarField carre_du_champ(const Generator& gen, const ScalarField& f);

// integral of f against m
double integrate(const Generator& gen, const ScalarField& f);
// E(f) = integral of Gamma(f) dm
double dirichlet_energy(const Generator& gen, const ScalarField& f);

// Gamma_2 form with test function:
//   Gamma2(f; phi) = 1/2 int Gamma(f) L phi dm - int Gamma(f, Lf) phi dm.
double gamma2_form(const Generator& gen, const ScalarField& f, const ScalarField& phi);

// Bakry-Emery defect
//   Gamma2(f; phi) - int (k Gamma(f) + (1/N)(Lf)^2) phi dm,
// nonnegative for all f and all phi >= 0 iff BE(k,N) holds on the mesh.
// phi must be nonnegative.
double be_defect(const Generator& gen, const ScalarField& k, DimensionBound N,
                 const ScalarField& f, const ScalarField& phi);

// Hessian of f evaluated on gradients of g and h through Gamma alone:
//   H_f(grad g, grad h) = 1/2 [ Gamma(g, Gamma(f,h)) + Gamma(h, Gamma(f,g))
//                               - Gamma(f, Gamma(g,h)) ].
ScalarField hessian_via_gamma(const Generator& gen, const ScalarField& f,
                              const ScalarField& g, const ScalarField& h);

// Time change by weight w; verifies the structural invariants of the
// transformed generator at construction.  |w| > 350 is rejected (e^{2w}
// would overflow; rescale the weight instead).
TimeChangedPair time_change(const Generator& gen, const ScalarField& w);

// Self-improvement slack of BE(K, infinity):
//   int (Lf)^2 dm - K E(f) - E(sqrt(Gamma(f)))
// with sqrt regularized as sqrt(Gamma + eps^2) - eps, eps = 1e-8 max Gamma(f).
// Nonnegative in the limit whenever BE(K, infinity) holds.
double sqrt_gamma_energy_check(const Generator& gen, double K, const ScalarField& f);

} // namespace gammatc

#endif
