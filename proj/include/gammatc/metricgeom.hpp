#ifndef GAMMATC_METRICGEOM_HPP
#define GAMMATC_METRICGEOM_HPP

#include "gammatc/mesh.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace gammatc {

// Conformal distance geometry on the mesh graph.  Each edge carries the
// Riemannian length of its straight chart segment (metric averaged to the
// midpoint) and the same length scaled by e^{w(midpoint)}; shortest paths
// over the scaled lengths realize the weighted distance, and a dual
// label-propagation solver provides an independent second algorithm.

struct GraphEdge {
    int to = -1;
    double base_len = 0.0; // segment length under g
    double len = 0.0;      // base_len * e^{(w_u + w_v)/2}
};

struct PathGraph {
    MeshPtr mesh;
    std::vector<std::vector<GraphEdge>> adj;

    int node_count() const { return static_cast<int>(adj.size()); }
};

// Mesh adjacency (plus both diagonals per cell in 2-D when `diagonals` is
// set, cutting metrication error) with midpoint-quadrature edge lengths.
PathGraph build_path_graph(const MetricField& metric, const ScalarField& w,
                           bool diagonals = true);

// Single-source shortest-path distances to every node (Dijkstra, ties broken
// by node index).  `conformal` selects the e^w-scaled lengths; false gives
// the unweighted-by-w base distance of the same graph.
std::vector<double> distance_field(const PathGraph& graph, int source, bool conformal = true);

// Distance to the nearest of several sources (multi-source Dijkstra).
std::vector<double> distance_field_multi(const PathGraph& graph, const std::vector<int>& sources,
                                         bool conformal = true);

struct ShortestPathTree {
    int source = -1;
    std::vector<double> dist;
    std::vector<int> prev; // -1 at the source and at unreachable nodes
};

// Full single-source tree, for batching many targets against one source.
ShortestPathTree shortest_path_tree(const PathGraph& graph, int source, bool conformal = true);

// Node sequence source..target along the tree; throws if unreachable.
std::vector<int> extract_path(const ShortestPathTree& tree, int target);

// Shortest-path value between two nodes over the scaled lengths.
double conformal_distance(const PathGraph& graph, int x, int y);

// Same metric, unscaled edge lengths.
double base_distance(const PathGraph& graph, int x, int y);

// sup { phi(x) - phi(y) : |phi(u) - phi(v)| <= len(u,v) on every edge },
// computed as the label-propagation fixed point phi(u) = min_v phi(v) +
// len(u,v) from y (FIFO relaxation, distinct schedule from Dijkstra).
// Equals the shortest-path distance on any finite connected graph.
double dual_distance(const PathGraph& graph, int x, int y);
std::vector<double> dual_distance_field(const PathGraph& graph, int source);

struct DistanceReport {
    int source = -1;
    int target = -1;
    double d_w_primal = 0.0;
    double d_w_dual = 0.0;
    double rel_gap = 0.0;       // |primal - dual| / max(primal, eps)
    std::vector<int> path;      // node ids, source first
    bool consistent = false;    // rel_gap <= 1e-12
};

DistanceReport distance_report(const PathGraph& graph, int x, int y);

struct ComparisonReport {
    int checked = 0;
    double max_violation = 0.0; // worst breach of either envelope bound
    bool pass = false;          // breach within rounding slack of the distances checked
};

// Asserts e^{min w} d(x,y) <= d^w(x,y) <= e^{max w} d(x,y) on every sampled
// pair; exact on graphs up to summation rounding, so any violation beyond
// 1e-12 of the distance scale is a defect.
ComparisonReport comparison_bounds_check(const PathGraph& graph, const ScalarField& w,
                                         const std::vector<std::pair<int, int>>& pairs);

struct VolumeGrowthVerdict {
    bool satisfied = false;
    double min_f_over_r = 0.0;  // condition (i), over [r_max/2, r_max]
    double max_p_over_r2 = 0.0; // condition (ii), over [f(r_max)/2, f(r_max)]
    double window_i_lo = 0.0, window_i_hi = 0.0;
    double window_ii_lo = 0.0, window_ii_hi = 0.0;
    double threshold_lower = 1e-3; // (i) passes iff min ratio >= this
    double threshold_upper = 1e3;  // (ii) passes iff max ratio <= this
};

// Squared-exponential volume growth condition on a finite window:
// f(r) = int_0^r e^{-q(s)} ds by composite trapezoid on `grid` intervals,
// then (i) f(r)/r bounded below on the outer half-window and (ii)
// p(f^{-1}(r))/r^2 bounded above on the outer half of f's range; f^{-1} by
// monotone interpolation.  Throws if the quadrature produces a
// non-increasing f.
VolumeGrowthVerdict volume_growth_condition(const std::function<double(double)>& p,
                                            const std::function<double(double)>& q,
                                            double r_max, int grid);

} // namespace gammatc

#endif
