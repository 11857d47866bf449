#include "gammatc/heatflow.hpp"

#include "gammatc/rng.hpp"

#include <Eigen/SparseLU>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gammatc {

namespace {

void check_node(const Generator& gen, int x0, const char* ctx) {
    if (x0 < 0 || x0 >= gen.size())
        throw std::invalid_argument(std::string(ctx) + ": node id out of range");
}

} // namespace

const Eigen::VectorXd& SemigroupSolve::at_time(double t) const {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return states[i];
    throw std::invalid_argument("SemigroupSolve: time " + std::to_string(t) + " was not recorded");
}

SemigroupSolve heat_solve(const Generator& gen, const ScalarField& f0, double t_final, int steps,
                          const std::vector<double>& record_times) {
    require_same_mesh(gen.mesh, f0.mesh, "heat_solve");
    if (steps < 1 || !(t_final >= 0.0))
        throw std::invalid_argument("heat_solve: need steps >= 1 and t_final >= 0");

    SemigroupSolve out;
    out.mesh = gen.mesh;
    out.dt = t_final / steps;
    out.times.push_back(0.0);
    out.states.push_back(f0.values);
    if (t_final == 0.0) return out;

    // Which step indices to record.
    std::set<int> record_at{steps};
    for (double r : record_times) {
        if (r == 0.0) continue;
        if (!(r > 0.0) || r > t_final + 1e-12)
            throw std::invalid_argument("heat_solve: record time outside [0, t_final]");
        const double k = r / out.dt;
        const int ki = static_cast<int>(std::lround(k));
        if (std::abs(k - ki) > 1e-6)
            throw std::invalid_argument("heat_solve: record time " + std::to_string(r) +
                                        " does not sit on the step grid");
        record_at.insert(ki);
    }

    const int n = gen.size();
    Eigen::SparseMatrix<double> L = gen.op; // column-major copy for the LU
    Eigen::SparseMatrix<double> eye(n, n);
    eye.setIdentity();
    const Eigen::SparseMatrix<double> A = eye - (0.5 * out.dt) * L;
    const Eigen::SparseMatrix<double> B = eye + (0.5 * out.dt) * L;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("heat_solve: factorization of the stepping matrix failed");

    const double mass0 = gen.measure.dot(f0.values);
    const double mass_scale = gen.measure.dot(f0.values.cwiseAbs().eval());
    const double lo0 = f0.values.minCoeff(), hi0 = f0.values.maxCoeff();
    const double mp_tol = 1e-6 * (1.0 + hi0 - lo0);

    Eigen::VectorXd u = f0.values;
    for (int k = 1; k <= steps; ++k) {
        u = lu.solve(B * u);
        if (lu.info() != Eigen::Success)
            throw std::runtime_error("heat_solve: linear solve failed at step " +
                                     std::to_string(k));
        const double mass = gen.measure.dot(u);
        // Each step's solve leaks O(eps) relative mass and the leaks add up, so
        // the budget grows with k.  A non-conservative operator overshoots this
        // by many orders on the first step already.
        if (std::abs(mass - mass0) > 1e-11 * k * std::max(mass_scale, 1e-300)) {
            std::ostringstream msg;
            msg << "heat_solve: mass drifted by " << std::scientific << mass - mass0
                << " at step " << k;
            throw std::runtime_error(msg.str());
        }
        if (u.minCoeff() < lo0 - mp_tol || u.maxCoeff() > hi0 + mp_tol)
            throw std::runtime_error("heat_solve: maximum principle violated at step " +
                                     std::to_string(k));
        if (record_at.count(k)) {
            out.times.push_back(k * out.dt);
            out.states.push_back(u);
        }
    }
    return out;
}

Eigen::VectorXd expm_reference(const Generator& gen, const ScalarField& f0, double t) {
    require_same_mesh(gen.mesh, f0.mesh, "expm_reference");
    if (gen.size() > 512)
        throw std::invalid_argument("expm_reference: dense exponential limited to 512 nodes");
    Eigen::MatrixXd M = Eigen::MatrixXd(gen.op) * t;
    return M.exp() * f0.values;
}

GradientEstimateReport gradient_estimate_check(const TimeChangedPair& pair, double Kprime,
                                               DimensionBound Nprime, const ScalarField& f,
                                               const std::vector<double>& t_list,
                                               const GradientEstimateOptions& opts) {
    require_same_mesh(pair.changed.mesh, f.mesh, "gradient_estimate_check");
    if (t_list.empty())
        throw std::invalid_argument("gradient_estimate_check: empty time list");
    double t_max = 0.0;
    for (double t : t_list) {
        if (!(t >= 0.0)) throw std::invalid_argument("gradient_estimate_check: negative time");
        t_max = std::max(t_max, t);
    }

    GradientEstimateReport rep;
    rep.kprime = Kprime;
    rep.nprime = Nprime;
    rep.certified = opts.certified;

    const ScalarField gf = carre_du_champ(pair.changed, f);
    SemigroupSolve usol, rsol;
    if (t_max > 0.0) {
        const int steps = std::max(1, static_cast<int>(std::lround(t_max * opts.steps_per_unit_time)));
        usol = heat_solve(pair.changed, f, t_max, steps, t_list);
        rsol = heat_solve(pair.changed, gf, t_max, steps, t_list);
    } else {
        usol.mesh = rsol.mesh = pair.changed.mesh;
        usol.times = rsol.times = {0.0};
        usol.states = {f.values};
        rsol.states = {gf.values};
    }

    const double invN = Nprime.reciprocal();
    for (double t : t_list) {
        const Eigen::VectorXd& u = usol.at_time(t);
        const Eigen::VectorXd& rhs = rsol.at_time(t);
        const ScalarField uf{pair.changed.mesh, u};
        const ScalarField gu = carre_du_champ(pair.changed, uf);
        const Eigen::VectorXd Lu = pair.changed.op * u;
        double coef = 0.0;
        if (invN > 0.0)
            coef = std::abs(Kprime) < 1e-12 ? 2.0 * t * invN
                                            : (1.0 - std::exp(-2.0 * Kprime * t)) /
                                                  (Nprime.value() * Kprime);
        const double damp = std::exp(-2.0 * Kprime * t);
        Eigen::VectorXd defect(u.size());
        double worst = std::numeric_limits<double>::infinity();
        for (int i = 0; i < u.size(); ++i) {
            defect[i] = damp * rhs[i] - gu[i] - coef * Lu[i] * Lu[i];
            worst = std::min(worst, defect[i]);
        }
        rep.times.push_back(t);
        rep.min_defect.push_back(worst);
        if (opts.record_fields) rep.defect_fields.push_back(std::move(defect));
    }
    return rep;
}

bool GradientEstimateReport::pass(double tol) const {
    for (double d : min_defect)
        if (!(d >= -tol)) return false;
    return true;
}

PathEnsemble simulate_time_changed_bm(const Generator& base_gen, const ScalarField& w, int x0,
                                      double t_target, int n_paths, std::uint64_t seed) {
    require_same_mesh(base_gen.mesh, w.mesh, "simulate_time_changed_bm");
    check_node(base_gen, x0, "simulate_time_changed_bm");
    if (n_paths < 1 || !(t_target >= 0.0))
        throw std::invalid_argument("simulate_time_changed_bm: need n_paths >= 1, t_target >= 0");

    const Eigen::VectorXd diag = base_gen.op.diagonal();
    const double max_rate = -diag.minCoeff();
    if (!(max_rate > 0.0))
        throw std::runtime_error("simulate_time_changed_bm: generator has no jumps");
    const double ds = 1.0 / max_rate;

    PathEnsemble ens;
    ens.seed = seed;
    ens.n_paths = n_paths;
    ens.t_target = t_target;
    ens.step_size = ds;
    ens.endpoints.resize(n_paths);
    ens.final_sigma.resize(n_paths);
    ens.steps_taken.resize(n_paths);

    const double wmin = w.values.minCoeff();
    const long budget =
        t_target == 0.0
            ? 0
            : static_cast<long>(std::ceil(t_target / (ds * std::exp(2.0 * wmin))) * 1.02) + 16;

    for (int p = 0; p < n_paths; ++p) {
        CounterRng rng(seed, static_cast<std::uint64_t>(p));
        int x = x0;
        double sigma = 0.0;
        double ew_here = std::exp(2.0 * w[x]);
        if (t_target == 0.0) {
            ens.endpoints[p] = x0;
            ens.final_sigma[p] = 0.0;
            ens.steps_taken[p] = 0;
            continue;
        }
        long k = 0;
        bool stopped = false;
        while (k < budget) {
            ++k;
            const double u = rng.uniform();
            int next = x;
            double acc = 1.0 + 0.5 * ds * diag[x];
            if (u >= acc) {
                for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(base_gen.op,
                                                                                    x);
                     it; ++it) {
                    if (it.col() == x) continue;
                    next = static_cast<int>(it.col());
                    acc += 0.5 * ds * it.value();
                    if (u < acc) break;
                }
            }
            const double ew_next = std::exp(2.0 * w[next]);
            const double dsig = 0.5 * ds * (ew_here + ew_next);
            if (sigma + dsig >= t_target) {
                const double theta = (t_target - sigma) / dsig;
                ens.endpoints[p] = theta < 1.0 ? x : next;
                ens.final_sigma[p] = sigma + dsig;
                ens.steps_taken[p] = k;
                stopped = true;
                break;
            }
            sigma += dsig;
            x = next;
            ew_here = ew_next;
        }
        if (!stopped)
            throw std::runtime_error(
                "simulate_time_changed_bm: clock reached " + std::to_string(sigma) + " of " +
                std::to_string(t_target) + " after " + std::to_string(budget) +
                " steps (step " + std::to_string(ds) + "); weight likely not finite");
    }
    return ens;
}

FeynmanKacReport feynman_kac_check(const Generator& base_gen, const ScalarField& w,
                                   const ScalarField& f, int x0, double t, int n_paths,
                                   std::uint64_t seed, int pde_steps) {
    require_same_mesh(base_gen.mesh, f.mesh, "feynman_kac_check");
    check_node(base_gen, x0, "feynman_kac_check");
    const TimeChangedPair pair = time_change(base_gen, w);

    FeynmanKacReport rep;
    rep.n_paths = n_paths;
    rep.t = t;
    rep.pde_value = t == 0.0 ? f[x0] : heat_solve(pair.changed, f, t, pde_steps).final_state()[x0];

    const PathEnsemble ens = simulate_time_changed_bm(base_gen, w, x0, 2.0 * t, n_paths, seed);
    double sum = 0.0, sumsq = 0.0;
    for (int p = 0; p < n_paths; ++p) {
        const double v = f[ens.endpoints[p]];
        sum += v;
        sumsq += v * v;
    }
    rep.mc_mean = sum / n_paths;
    const double var =
        n_paths > 1 ? std::max(0.0, (sumsq - sum * rep.mc_mean) / (n_paths - 1)) : 0.0;
    rep.mc_stderr = std::sqrt(var / n_paths);

    const double diff = std::abs(rep.mc_mean - rep.pde_value);
    if (rep.mc_stderr < 1e-14 * (1.0 + std::abs(rep.mc_mean))) {
        rep.degenerate = true;
        rep.pass = diff <= 1e-10 * (1.0 + std::abs(rep.pde_value));
        rep.z_score = rep.pass ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
        rep.z_score = diff / rep.mc_stderr;
        rep.pass = rep.z_score <= 3.0;
    }
    return rep;
}

} // namespace gammatc
