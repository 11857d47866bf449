#include "gammatc/convexify.hpp"

#include "gammatc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gammatc {

namespace {

std::vector<int> nodes_with_flag(const std::vector<std::uint8_t>& flags, bool value) {
    std::vector<int> out;
    for (std::size_t i = 0; i < flags.size(); ++i)
        if (static_cast<bool>(flags[i]) == value) out.push_back(static_cast<int>(i));
    return out;
}

} // namespace

int DomainMask::inside_count() const {
    return static_cast<int>(std::count(inside.begin(), inside.end(), std::uint8_t(1)));
}

int DomainMask::outside_count() const {
    return static_cast<int>(inside.size()) - inside_count();
}

DomainMask make_mask(const MeshPtr& mesh, const std::vector<std::uint8_t>& inside,
                     double eps_bd) {
    if (static_cast<int>(inside.size()) != mesh->node_count())
        throw std::invalid_argument("make_mask: flag count does not match the mesh");
    if (!(eps_bd >= 0.0)) throw std::invalid_argument("make_mask: eps_bd must be >= 0");
    return DomainMask{mesh, inside, eps_bd, {}};
}

void mark_band(DomainMask& mask, const ScalarField& V) {
    require_same_mesh(mask.mesh, V.mesh, "mark_band");
    const Mesh& m = *mask.mesh;
    mask.band.assign(m.node_count(), 0);
    for (int i = 0; i < m.node_count(); ++i)
        if (std::abs(V[i]) <= mask.eps_bd) mask.band[i] = 1;
    // Every sign change must be swallowed by the band.
    for (int i = 0; i < m.node_count(); ++i) {
        const auto ij = m.indices(i);
        const int nb[2] = {m.node_at(ij[0] + 1, ij[1]),
                           m.dim == 2 ? m.node_at(ij[0], ij[1] + 1) : i};
        for (int a = 0; a < m.dim; ++a) {
            const int j = nb[a];
            if (mask.inside[i] != mask.inside[j] && !(mask.band[i] && mask.band[j]))
                throw std::runtime_error(
                    "mark_band: region boundary between nodes " + std::to_string(i) + " and " +
                    std::to_string(j) + " escapes the eps_bd band; enlarge eps_bd");
        }
    }
}

void ConvexifyParams::validate() const {
    if (!(lp < 0.0)) throw std::invalid_argument("ConvexifyParams: l' must be negative");
    if (!(r0 > 0.0)) throw std::invalid_argument("ConvexifyParams: r0 must be positive");
    if (N.is_infinite() || !(N.value() > 1.0))
        throw std::invalid_argument("ConvexifyParams: N must be finite and > 1");
}

ScalarField signed_distance(const PathGraph& graph, const DomainMask& mask) {
    require_same_mesh(graph.mesh, mask.mesh, "signed_distance");
    const std::vector<int> ins = nodes_with_flag(mask.inside, true);
    const std::vector<int> outs = nodes_with_flag(mask.inside, false);
    if (ins.empty() || outs.empty())
        throw std::invalid_argument("signed_distance: inside and outside must both be nonempty");
    const std::vector<double> d_to_out = distance_field_multi(graph, outs, false);
    const std::vector<double> d_to_in = distance_field_multi(graph, ins, false);
    ScalarField V = zero_field(mask.mesh);
    for (int i = 0; i < mask.mesh->node_count(); ++i)
        V[i] = mask.inside[i] ? -d_to_out[i] : d_to_in[i];
    return V;
}

ScalarField disc_signed_distance(const MeshPtr& mesh, double R) {
    if (mesh->dim != 2)
        throw std::invalid_argument("disc_signed_distance: need a two-dimensional mesh");
    if (!(R > 0.0) || !(R < 0.5 * std::min(mesh->length[0], mesh->length[1])))
        throw std::invalid_argument("disc_signed_distance: need 0 < R < half the period");
    ScalarField V = zero_field(mesh);
    const double cx = 0.5 * mesh->length[0], cy = 0.5 * mesh->length[1];
    for (int i = 0; i < mesh->node_count(); ++i) {
        const auto x = mesh->coord(i);
        const double dx = std::remainder(x[0] - cx, mesh->length[0]);
        const double dy = std::remainder(x[1] - cy, mesh->length[1]);
        V[i] = R - std::hypot(dx, dy);
    }
    return V;
}

double cot_kn(double K, double N, double x) {
    if (!(N > 1.0)) throw std::invalid_argument("cot_kn: need N > 1");
    if (!(x > 0.0)) throw std::invalid_argument("cot_kn: need x > 0");
    if (K > 0.0) {
        const double arg = std::sqrt(K / (N - 1.0)) * x;
        if (arg >= M_PI)
            throw std::invalid_argument("cot_kn: x = " + std::to_string(x) +
                                        " at or past the cotangent pole pi sqrt((N-1)/K)");
        return std::sqrt(K * (N - 1.0)) / std::tan(arg);
    }
    if (K == 0.0) return (N - 1.0) / x;
    const double arg = std::sqrt(-K / (N - 1.0)) * x;
    return std::sqrt(-K * (N - 1.0)) / std::tanh(arg);
}

PhiEval cutoff_phi(double lp, double r0, double t) {
    if (!(lp < 0.0) || !(r0 > 0.0))
        throw std::invalid_argument("cutoff_phi: need l' < 0 and r0 > 0");
    const double a = -0.25 * lp * r0;
    const double s = t < 0.0 ? -1.0 : 1.0;
    const double u = std::abs(t);
    if (u <= a) return {t, 1.0, 0.0};
    if (u >= 3.0 * a) return {s * 2.0 * a, 0.0, 0.0};
    const double e = u - a;
    return {s * (u - e * e / (4.0 * a)), 1.0 - e / (2.0 * a), -s / (2.0 * a)};
}

PhiAudit audit_cutoff(double lp, double r0, int grid) {
    if (grid < 16) throw std::invalid_argument("audit_cutoff: grid too small to mean anything");
    const double a = -0.25 * lp * r0;
    PhiAudit audit;
    audit.grid = grid;
    audit.second_bound = -2.0 / (lp * r0);
    audit.min_deriv = std::numeric_limits<double>::infinity();
    const double span = 4.0 * a; // covers both plateaus with margin
    for (int i = 0; i <= grid; ++i) {
        const double t = -span + 2.0 * span * i / grid;
        const PhiEval p = cutoff_phi(lp, r0, t);
        audit.max_deriv = std::max(audit.max_deriv, p.deriv);
        audit.min_deriv = std::min(audit.min_deriv, p.deriv);
        audit.max_second_abs = std::max(audit.max_second_abs, std::abs(p.second));
        if (std::abs(t) <= a)
            audit.middle_max_err = std::max(audit.middle_max_err, std::abs(p.value - t));
        if (std::abs(t) >= 3.0 * a)
            audit.plateau_max_err =
                std::max(audit.plateau_max_err, std::abs(p.value - (t < 0 ? -2.0 * a : 2.0 * a)));
    }
    audit.pass = audit.max_deriv <= 1.0 && audit.min_deriv >= 0.0 &&
                 audit.max_second_abs <= audit.second_bound && audit.middle_max_err == 0.0 &&
                 audit.plateau_max_err == 0.0;
    if (!audit.pass)
        throw std::runtime_error("audit_cutoff: constructed profile violates a stated bound");
    return audit;
}

ScalarField build_weight(const ScalarField& V, const ConvexifyParams& params) {
    params.validate();
    audit_cutoff(params.lp, params.r0);
    ScalarField w = zero_field(V.mesh);
    for (int i = 0; i < V.size(); ++i) w[i] = cutoff_phi(params.lp, params.r0, -params.lp * V[i]).value;
    return w;
}

LaplacianBoundReport laplacian_bound_check(const Generator& gen, const ScalarField& w,
                                           const ConvexifyParams& params,
                                           const DomainMask& mask) {
    require_same_mesh(gen.mesh, w.mesh, "laplacian_bound_check");
    require_same_mesh(gen.mesh, mask.mesh, "laplacian_bound_check");
    params.validate();
    if (static_cast<int>(mask.band.size()) != gen.size())
        throw std::invalid_argument("laplacian_bound_check: mask band not marked");

    LaplacianBoundReport rep;
    rep.bound = -params.lp * (cot_kn(params.K, params.N.value(), params.r0 / 4.0) + 2.0 / params.r0);
    const ScalarField Lw = apply_generator(gen, w);
    rep.defect = zero_field(gen.mesh);
    rep.eligible.assign(gen.size(), 0);
    rep.min_defect = std::numeric_limits<double>::infinity();
    for (int i = 0; i < gen.size(); ++i) {
        rep.defect[i] = rep.bound - Lw[i];
        rep.eligible[i] = mask.band[i] ? 0 : 1;
        if (rep.eligible[i] && rep.defect[i] < rep.min_defect) {
            rep.min_defect = rep.defect[i];
            rep.argmin_node = i;
        }
    }
    return rep;
}

CertificateReport convexity_certificate(const PathGraph& graph_w, const DomainMask& mask,
                                        int pairs, std::uint64_t seed) {
    require_same_mesh(graph_w.mesh, mask.mesh, "convexity_certificate");
    if (pairs < 1) throw std::invalid_argument("convexity_certificate: need pairs >= 1");
    if (static_cast<int>(mask.band.size()) != graph_w.node_count())
        throw std::invalid_argument("convexity_certificate: mask band not marked");
    const std::vector<int> ins = nodes_with_flag(mask.inside, true);
    if (ins.size() < 2)
        throw std::invalid_argument("convexity_certificate: need at least two inside nodes");

    // Batch targets against shared sources: each source costs one sweep.
    const int n_src = std::max(1, static_cast<int>(std::lround(std::sqrt(double(pairs)))));
    const int n_tgt = (pairs + n_src - 1) / n_src;
    CounterRng rng(seed, 0xce27);

    CertificateReport rep;
    for (int si = 0; si < n_src && rep.pairs_checked < pairs; ++si) {
        const int src = ins[rng.below(ins.size())];
        const ShortestPathTree tree = shortest_path_tree(graph_w, src, true);
        for (int ti = 0; ti < n_tgt && rep.pairs_checked < pairs; ++ti) {
            std::size_t idx = rng.below(ins.size());
            if (ins[idx] == src) idx = (idx + 1) % ins.size();
            const int tgt = ins[idx];
            ++rep.pairs_checked;
            bool bad = false;
            for (int node : extract_path(tree, tgt))
                if (!mask.inside[node] && !mask.band[node]) {
                    bad = true;
                    break;
                }
            if (bad) {
                ++rep.violations;
                if (rep.first_violation.first < 0) rep.first_violation = {src, tgt};
            }
        }
    }
    rep.pass = rep.violations == 0;
    return rep;
}

MinkowskiReport minkowski_content(const DomainMask& mask, const PathGraph& graph,
                                  const std::vector<double>& eps_list,
                                  const Eigen::VectorXd& measure) {
    require_same_mesh(mask.mesh, graph.mesh, "minkowski_content");
    if (eps_list.empty()) throw std::invalid_argument("minkowski_content: empty eps list");
    const Mesh& m = *mask.mesh;
    const double h = std::max(m.spacing[0], m.dim == 2 ? m.spacing[1] : 0.0);
    Eigen::VectorXd mu = measure;
    if (mu.size() == 0) mu = Eigen::VectorXd::Constant(m.node_count(), m.cell_volume());
    if (mu.size() != m.node_count())
        throw std::invalid_argument("minkowski_content: measure size mismatch");

    MinkowskiReport rep;
    rep.eps = eps_list;
    std::sort(rep.eps.begin(), rep.eps.end());
    for (double e : rep.eps)
        if (!(e >= 2.0 * h))
            throw std::invalid_argument(
                "minkowski_content: eps below twice the mesh spacing is all staircase");

    const std::vector<int> ins = nodes_with_flag(mask.inside, true);
    if (ins.empty() || ins.size() == mask.inside.size()) {
        rep.content.assign(rep.eps.size(), 0.0); // no boundary at all
        rep.extrapolated = 0.0;
        return rep;
    }
    const std::vector<double> dist = distance_field_multi(graph, ins, false);
    for (double e : rep.eps) {
        double extra = 0.0;
        for (int i = 0; i < m.node_count(); ++i)
            if (!mask.inside[i] && dist[i] < e) extra += mu[i];
        rep.content.push_back(extra / e);
    }
    if (rep.eps.size() >= 2) {
        const double c0 = rep.content[0], c1 = rep.content[1];
        const double e0 = rep.eps[0], e1 = rep.eps[1];
        rep.extrapolated = c0 - e0 * (c1 - c0) / (e1 - e0);
    } else {
        rep.extrapolated = rep.content[0];
    }
    return rep;
}

} // namespace gammatc
