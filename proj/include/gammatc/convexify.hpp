#ifndef GAMMATC_CONVEXIFY_HPP
#define GAMMATC_CONVEXIFY_HPP

#include "gammatc/dimension.hpp"
#include "gammatc/dirichlet.hpp"
#include "gammatc/mesh.hpp"
#include "gammatc/metricgeom.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace gammatc {

// Convexifying-weight construction: signed distance to a region boundary,
// the clamped cutoff profile, w = phi(-l' V), the interior Laplacian bound,
// and a path-sampling convexity certificate in the weighted distance.

struct DomainMask {
    MeshPtr mesh;
    std::vector<std::uint8_t> inside;
    double eps_bd = 0.0;             // boundary band radius
    std::vector<std::uint8_t> band;  // |V| <= eps_bd; set by mark_band

    int inside_count() const;
    int outside_count() const;
};

DomainMask make_mask(const MeshPtr& mesh, const std::vector<std::uint8_t>& inside,
                     double eps_bd);

// band := {|V| <= eps_bd}; verifies every edge of the mesh 4-neighborhood
// crossing the region boundary has both endpoints in the band.
void mark_band(DomainMask& mask, const ScalarField& V);

struct ConvexifyParams {
    double lp = -1.0;  // l' < 0, the target convexity deficit
    double r0 = 1.0;   // > 0, profile radius
    double K = 0.0;    // comparison curvature bound of the base space
    DimensionBound N = DimensionBound::finite(2.0); // finite, > 1

    void validate() const;
};

// Signed distance V = d(., Omega) - d(., X \ Omega) on the graph: negative
// inside, positive outside, |V| = distance to the opposite region; two
// multi-source shortest-path sweeps over the base edge lengths.
ScalarField signed_distance(const PathGraph& graph, const DomainMask& mask);

// Chart-exact signed distance for the disc-complement domain: a disc of
// radius R at the chart midpoint, inside = beyond the disc, V = R - rho with
// rho the min-image chart distance to the center.  Use this (not the graph
// sweep) when differentiating V: 8-neighbor graph balls are octagons, and
// their flat facets put Theta(1/h) valleys into L(phi(-l'V)) along diagonal
// rays, which no Laplacian bound survives.
ScalarField disc_signed_distance(const MeshPtr& mesh, double R);

// Comparison cotangent
//   K > 0: sqrt(K(N-1)) cot(sqrt(K/(N-1)) x)   (pole at x = pi sqrt((N-1)/K))
//   K = 0: (N-1)/x
//   K < 0: sqrt(-K(N-1)) coth(sqrt(-K/(N-1)) x)
double cot_kn(double K, double N, double x);

struct PhiEval {
    double value = 0.0;
    double deriv = 0.0;
    double second = 0.0; // defined a.e.; branch value at the kinks
};

// Odd cutoff profile with a := -l' r0 / 4:
//   phi(t) = t on [-a, a], constant +-2a beyond +-3a, and the quadratic ramp
//   t - (|t|-a)^2/(4a) (sign-matched) on the transitions.
// The constraint set (slope from 1 to 0 across a width-2a band, curvature
// magnitude capped at 1/(2a) = -2/(l' r0), identity in the middle, plateaus
// outside) forces constant curvature on the transitions, so this piecewise
// quadratic is the unique profile meeting every bound — the cap is attained,
// not undercut, and no twice-continuously-differentiable profile fits it.
PhiEval cutoff_phi(double lp, double r0, double t);

struct PhiAudit {
    int grid = 0;
    double max_deriv = 0.0;
    double min_deriv = 0.0;
    double max_second_abs = 0.0;
    double second_bound = 0.0;  // -2/(l' r0)
    double middle_max_err = 0.0;
    double plateau_max_err = 0.0;
    bool pass = false;
};

// Grid verification of the four profile constraints; throws on violation
// (parameter pathology) so a bad profile can never be built silently.
PhiAudit audit_cutoff(double lp, double r0, int grid = 1000);

// w = phi(-l' V) per node; constant on the two plateaus, so
// ||w||_inf = -l' r0 / 2 whenever V reaches past +-(3/4) r0 on both sides.
ScalarField build_weight(const ScalarField& V, const ConvexifyParams& params);

struct LaplacianBoundReport {
    double bound = 0.0;               // -l' (cot_KN(r0/4) + 2/r0)
    ScalarField defect;               // bound - (Lw)_i, all nodes
    std::vector<std::uint8_t> eligible; // outside the boundary band
    double min_defect = 0.0;          // over eligible nodes
    int argmin_node = -1;
};

// Interior bound on the weight's Laplacian: defect = bound - Lw per node,
// reported over nodes outside the eps_bd band (the signed distance is not
// smooth at the boundary, so band nodes carry no meaning).
LaplacianBoundReport laplacian_bound_check(const Generator& gen, const ScalarField& w,
                                           const ConvexifyParams& params,
                                           const DomainMask& mask);

struct CertificateReport {
    int pairs_checked = 0;
    int violations = 0;              // pairs whose path leaves the region
    std::pair<int, int> first_violation{-1, -1};
    bool pass = false;
};

// Samples pairs of inside nodes, extracts each weighted shortest path, and
// counts pairs whose path visits a node that is neither inside nor in the
// boundary band.  Zero violations certifies (sampled) geodesic convexity of
// the region in the weighted distance.
CertificateReport convexity_certificate(const PathGraph& graph_w, const DomainMask& mask,
                                        int pairs, std::uint64_t seed);

struct MinkowskiReport {
    std::vector<double> eps;
    std::vector<double> content;  // (m(Z^eps) - m(Z)) / eps
    double extrapolated = 0.0;    // linear extrapolation to eps = 0
};

// Outer Minkowski content estimate of the inside region's boundary:
// m(Z^eps) sums node measures over {dist to Z < eps}.  Node measure
// defaults to the flat cell volume; pass `measure` to weight it.  Each eps
// must be >= 2h to dominate the graph-distance staircase.
MinkowskiReport minkowski_content(const DomainMask& mask, const PathGraph& graph,
                                  const std::vector<double>& eps_list,
                                  const Eigen::VectorXd& measure = {});

} // namespace gammatc

#endif
