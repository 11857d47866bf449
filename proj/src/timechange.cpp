#include "gammatc/timechange.hpp"

#include "gammatc/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gammatc {

double time_change_coefficient(DimensionBound N, DimensionBound Nprime) {
    if (N.is_infinite() || N.value() < 2.0)
        throw std::invalid_argument("time_change_coefficient: need finite N >= 2, got " + N.str());
    if (!(Nprime > N))
        throw std::invalid_argument("time_change_coefficient: need N' in (N, inf], got N'=" +
                                    Nprime.str() + " with N=" + N.str());
    const double n = N.value();
    if (Nprime.is_infinite()) return n - 2.0;
    const double np = Nprime.value();
    return (n - 2.0) * (np - 2.0) / (np - n);
}

Eigen::MatrixXd transformed_hessian(const HessianSample& s) {
    if (s.n < 1 || s.hess_f.rows() != s.n || s.hess_f.cols() != s.n ||
        s.grad_f.size() != s.n || s.grad_w.size() != s.n)
        throw std::invalid_argument("transformed_hessian: inconsistent sample dimensions");
    const double ip = s.grad_f.dot(s.grad_w);
    Eigen::MatrixXd H = s.hess_f - s.grad_w * s.grad_f.transpose() -
                        s.grad_f * s.grad_w.transpose();
    H.diagonal().array() += ip;
    return H;
}

double matrix_inequality_defect(const HessianSample& s, DimensionBound Nprime) {
    if (!Nprime.is_infinite() && Nprime.value() <= s.n)
        throw std::invalid_argument("matrix_inequality_defect: need N' > n");
    const Eigen::MatrixXd H = transformed_hessian(s);
    const double a1 = H.squaredNorm();
    const double a2 = s.lap_f - H.trace();
    const double excess = Nprime.is_infinite() ? 0.0 : a2 * a2 / (Nprime.value() - s.n);
    return a1 + excess - Nprime.reciprocal() * s.lap_f * s.lap_f;
}

Eigen::Matrix2d quartic_form_matrix(DimensionBound N, DimensionBound Nprime, int n) {
    if (n < 1)
        throw std::invalid_argument("quartic_form_matrix: need chart dimension n >= 1");
    if (N.is_infinite() || N.value() < n)
        throw std::invalid_argument("quartic_form_matrix: need finite N >= n");
    if (!(Nprime > N))
        throw std::invalid_argument("quartic_form_matrix: need N' > N");

    Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
    const double Nv = N.value();
    if (Nv == static_cast<double>(n)) return a; // first variable vanishes; form taken 0

    const double inv_excess = Nprime.is_infinite() ? 0.0 : 1.0 / (Nprime.value() - n);
    const double gamma_coef =
        Nprime.is_infinite() ? Nv - 2.0
                             : (Nv - 2.0) * (Nprime.value() - 2.0) / (Nprime.value() - Nv);
    a(0, 0) = 1.0 / (Nv - n) - inv_excess;
    a(0, 1) = a(1, 0) = 1.0 - (2.0 - n) * inv_excess;
    a(1, 1) = gamma_coef - (n - 2.0) - (n - 2.0) * (n - 2.0) * inv_excess;
    return a;
}

double min_eigenvalue_2x2(const Eigen::Matrix2d& a) {
    const double tr = a(0, 0) + a(1, 1);
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    return tr / 2.0 - disc;
}

MatrixSweepSummary sweep_matrix_inequality(int n, DimensionBound Nprime, int count,
                                           std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sweep_matrix_inequality: need n >= 1");
    MatrixSweepSummary sum;
    sum.n = n;
    sum.nprime = Nprime.value();
    sum.count = count;
    sum.seed = seed;
    sum.min_defect = std::numeric_limits<double>::infinity();
    sum.min_normalized_defect = std::numeric_limits<double>::infinity();
    CounterRng rng(seed, 0x68657373ull + static_cast<std::uint64_t>(n));
    for (int k = 0; k < count; ++k) {
        HessianSample s;
        s.n = n;
        s.hess_f.resize(n, n);
        s.grad_f.resize(n);
        s.grad_w.resize(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const double v = rng.normal();
                s.hess_f(i, j) = s.hess_f(j, i) = v;
            }
        for (int i = 0; i < n; ++i) s.grad_f[i] = rng.normal();
        for (int i = 0; i < n; ++i) s.grad_w[i] = rng.normal();
        s.lap_f = rng.normal();

        const double d = matrix_inequality_defect(s, Nprime);
        const double scale = 1.0 + transformed_hessian(s).squaredNorm() + s.lap_f * s.lap_f;
        const double dn = d / scale;
        if (d < sum.min_defect) sum.min_defect = d;
        if (dn < sum.min_normalized_defect) {
            sum.min_normalized_defect = dn;
            sum.argmin_index = k;
            sum.argmin_sample = s;
        }
    }
    return sum;
}

QuarticSweepSummary sweep_quartic_forms(double N_max, double Nprime_max, double step) {
    if (!(step > 0.0))
        throw std::invalid_argument("sweep_quartic_forms: step must be positive");
    QuarticSweepSummary sum;
    sum.min_eigenvalue = std::numeric_limits<double>::infinity();
    auto consider = [&](int n, double Nv, DimensionBound Np, double np_label) {
        const Eigen::Matrix2d a = quartic_form_matrix(DimensionBound::finite(Nv), Np, n);
        const double lam = min_eigenvalue_2x2(a);
        ++sum.count;
        if (lam < sum.min_eigenvalue) {
            sum.min_eigenvalue = lam;
            sum.argmin_n = n;
            sum.argmin_N = Nv;
            sum.argmin_Nprime = np_label;
        }
    };
    for (int n = 1; n <= 2; ++n) {
        for (double Nv = n; Nv <= N_max + 1e-12; Nv += step) {
            for (double np = Nv + step; np <= Nprime_max + 1e-12; np += step)
                consider(n, Nv, DimensionBound::finite(np), np);
            consider(n, Nv, DimensionBound::infinite(), std::numeric_limits<double>::infinity());
        }
    }
    return sum;
}

} // namespace gammatc
