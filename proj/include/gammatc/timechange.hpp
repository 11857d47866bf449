#ifndef GAMMATC_TIMECHANGE_HPP
#define GAMMATC_TIMECHANGE_HPP

#include "gammatc/dimension.hpp"

#include <Eigen/Dense>
#include <cstdint>

namespace gammatc {

// Coefficient (N-2)(N'-2)/(N'-N) multiplying Gamma(w) in the transformed
// curvature bound.  Requires finite N >= 2 and N' in (N, infinity]; the
// N' = infinity limit is N-2.  Identically zero when N = 2 for every
// admissible N': a two-dimensional base loses no curvature to the
// gradient term.
double time_change_coefficient(DimensionBound N, DimensionBound Nprime);

// One pointwise sample of the data entering the Hessian transformation
// identity, in an orthonormal frame of an n-dimensional chart.  lap_f is
// the ambient operator value, carried separately from tr(hess_f): the two
// differ by the trace over the unseen N - n directions, so tests must be
// able to vary them independently.
struct HessianSample {
    int n = 0;
    Eigen::MatrixXd hess_f; // n x n, symmetric
    Eigen::VectorXd grad_f; // n
    Eigen::VectorXd grad_w; // n
    double lap_f = 0.0;     // Delta f
};

// H_ij = (hess_f)_ij - w_i f_j - w_j f_i + <grad f, grad w> delta_ij.
Eigen::MatrixXd transformed_hessian(const HessianSample& s);

// Defect of the transformed-Hessian trace inequality:
//   A1 = |H|_HS^2,  A2 = lap_f - tr H,
//   defect = A1 + A2^2/(N'-n) - lap_f^2 / N'  >= 0.
// The A2 term drops when N' is infinite.  Requires N' > n.
double matrix_inequality_defect(const HessianSample& s, DimensionBound Nprime);

// 2x2 coefficient matrix of the residual quadratic form in the variables
//   (lap_f - tr hess_f, Gamma(f,w)):
//   a11 = 1/(N-n) - 1/(N'-n)
//   a12 = 1 - (2-n)/(N'-n)
//   a22 = (N-2)(N'-2)/(N'-N) - (n-2) - (n-2)^2/(N'-n)
// with N' = infinity limits a11 = 1/(N-n), a12 = 1, a22 = (N-2) - (n-2).
// At n = N the first variable is identically zero and the form is taken 0:
// the returned matrix is zero (a22 itself evaluates to 0 there).
// Positive semidefinite on the whole admissible range n <= N < N'; its
// determinant vanishes identically, so the form is a perfect square.
Eigen::Matrix2d quartic_form_matrix(DimensionBound N, DimensionBound Nprime, int n);

double min_eigenvalue_2x2(const Eigen::Matrix2d& a);

struct MatrixSweepSummary {
    int n = 0;
    double nprime = 0.0; // +inf allowed
    int count = 0;
    std::uint64_t seed = 0;
    double min_defect = 0.0;            // most negative raw defect
    double min_normalized_defect = 0.0; // defect / (1 + |H|^2 + lap_f^2)
    int argmin_index = -1;
    HessianSample argmin_sample;
};

// Random sweep of matrix_inequality_defect: entries of hess_f i.i.d.
// standard normal then symmetrized, gradients and lap_f standard normal.
// Deterministic in (seed, n, count).
MatrixSweepSummary sweep_matrix_inequality(int n, DimensionBound Nprime, int count,
                                           std::uint64_t seed);

struct QuarticSweepSummary {
    int count = 0;
    double min_eigenvalue = 0.0;
    int argmin_n = 0;
    double argmin_N = 0.0;
    double argmin_Nprime = 0.0; // +inf allowed
};

// Minimum eigenvalue of quartic_form_matrix over a grid:
// n in {1,2}, N from n to N_max in steps of `step`, N' from N+step to
// Nprime_max in the same steps, plus N' = infinity for every (n, N).
QuarticSweepSummary sweep_quartic_forms(double N_max, double Nprime_max, double step);

} // namespace gammatc

#endif
