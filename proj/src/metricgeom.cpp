#include "gammatc/metricgeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

namespace gammatc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double segment_length(const MetricField& metric, int u, int v) {
    const auto d = metric.mesh->displacement(u, v);
    // Midpoint metric from averaged components (second-order quadrature).
    if (metric.mesh->dim == 1) {
        const double g = 0.5 * (metric.comps(u, 0) + metric.comps(v, 0));
        return std::sqrt(g) * std::abs(d[0]);
    }
    const double a = 0.5 * (metric.comps(u, 0) + metric.comps(v, 0));
    const double b = 0.5 * (metric.comps(u, 1) + metric.comps(v, 1));
    const double c = 0.5 * (metric.comps(u, 2) + metric.comps(v, 2));
    return std::sqrt(a * d[0] * d[0] + 2.0 * b * d[0] * d[1] + c * d[1] * d[1]);
}

struct SearchResult {
    std::vector<double> dist;
    std::vector<int> prev;
};

SearchResult dijkstra(const PathGraph& graph, int source, bool conformal, int stop_at) {
    const int n = graph.node_count();
    if (source < 0 || source >= n)
        throw std::invalid_argument("distance query: node id out of range");
    SearchResult r{std::vector<double>(n, kInf), std::vector<int>(n, -1)};
    std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                        std::greater<>>
        pq;
    r.dist[source] = 0.0;
    pq.emplace(0.0, source);
    while (!pq.empty()) {
        const auto [d, u] = pq.top();
        pq.pop();
        if (d > r.dist[u]) continue;
        if (u == stop_at) break;
        for (const GraphEdge& e : graph.adj[u]) {
            const double len = conformal ? e.len : e.base_len;
            const double nd = d + len;
            if (nd < r.dist[e.to]) {
                r.dist[e.to] = nd;
                r.prev[e.to] = u;
                pq.emplace(nd, e.to);
            }
        }
    }
    return r;
}

} // namespace

PathGraph build_path_graph(const MetricField& metric, const ScalarField& w, bool diagonals) {
    require_same_mesh(metric.mesh, w.mesh, "build_path_graph");
    const Mesh& m = *metric.mesh;
    PathGraph g;
    g.mesh = metric.mesh;
    g.adj.assign(m.node_count(), {});
    auto add_edge = [&](int u, int v) {
        const double base = segment_length(metric, u, v);
        if (!(base > 0.0))
            throw std::runtime_error("build_path_graph: nonpositive edge length at node " +
                                     std::to_string(u));
        const double len = base * std::exp(0.5 * (w[u] + w[v]));
        g.adj[u].push_back({v, base, len});
        g.adj[v].push_back({u, base, len});
    };
    for (int i = 0; i < m.node_count(); ++i) {
        const auto ij = m.indices(i);
        add_edge(i, m.node_at(ij[0] + 1, ij[1]));
        if (m.dim == 2) {
            add_edge(i, m.node_at(ij[0], ij[1] + 1));
            if (diagonals) {
                add_edge(i, m.node_at(ij[0] + 1, ij[1] + 1));
                add_edge(i, m.node_at(ij[0] + 1, ij[1] - 1));
            }
        }
    }
    return g;
}

std::vector<double> distance_field(const PathGraph& graph, int source, bool conformal) {
    return dijkstra(graph, source, conformal, -1).dist;
}

std::vector<double> distance_field_multi(const PathGraph& graph, const std::vector<int>& sources,
                                         bool conformal) {
    const int n = graph.node_count();
    std::vector<double> dist(n, kInf);
    std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                        std::greater<>>
        pq;
    for (int s : sources) {
        if (s < 0 || s >= n)
            throw std::invalid_argument("distance_field_multi: node id out of range");
        dist[s] = 0.0;
        pq.emplace(0.0, s);
    }
    while (!pq.empty()) {
        const auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        for (const GraphEdge& e : graph.adj[u]) {
            const double nd = d + (conformal ? e.len : e.base_len);
            if (nd < dist[e.to]) {
                dist[e.to] = nd;
                pq.emplace(nd, e.to);
            }
        }
    }
    return dist;
}

ShortestPathTree shortest_path_tree(const PathGraph& graph, int source, bool conformal) {
    SearchResult r = dijkstra(graph, source, conformal, -1);
    return {source, std::move(r.dist), std::move(r.prev)};
}

std::vector<int> extract_path(const ShortestPathTree& tree, int target) {
    if (target < 0 || target >= static_cast<int>(tree.dist.size()))
        throw std::invalid_argument("extract_path: node id out of range");
    if (!(tree.dist[target] < kInf))
        throw std::runtime_error("extract_path: target unreachable from the tree source");
    std::vector<int> path;
    for (int v = target; v != -1; v = tree.prev[v]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
}

double conformal_distance(const PathGraph& graph, int x, int y) {
    if (y < 0 || y >= graph.node_count())
        throw std::invalid_argument("conformal_distance: node id out of range");
    const double d = dijkstra(graph, x, true, y).dist[y];
    if (!(d < kInf))
        throw std::runtime_error("conformal_distance: target unreachable (disconnected graph)");
    return d;
}

double base_distance(const PathGraph& graph, int x, int y) {
    if (y < 0 || y >= graph.node_count())
        throw std::invalid_argument("base_distance: node id out of range");
    const double d = dijkstra(graph, x, false, y).dist[y];
    if (!(d < kInf))
        throw std::runtime_error("base_distance: target unreachable (disconnected graph)");
    return d;
}

std::vector<double> dual_distance_field(const PathGraph& graph, int source) {
    const int n = graph.node_count();
    if (source < 0 || source >= n)
        throw std::invalid_argument("dual_distance: node id out of range");
    std::vector<double> phi(n, kInf);
    std::vector<char> queued(n, 0);
    std::queue<int> fifo;
    phi[source] = 0.0;
    fifo.push(source);
    queued[source] = 1;
    // FIFO label correcting settles within n relaxation rounds on a graph
    // with positive lengths; the cap turns a logic error into a loud one.
    const long cap = static_cast<long>(n + 1) * n * 9;
    long pops = 0;
    while (!fifo.empty()) {
        if (++pops > cap) throw std::runtime_error("dual_distance: relaxation did not settle");
        const int v = fifo.front();
        fifo.pop();
        queued[v] = 0;
        for (const GraphEdge& e : graph.adj[v]) {
            const double nd = phi[v] + e.len;
            if (nd < phi[e.to]) {
                phi[e.to] = nd;
                if (!queued[e.to]) {
                    fifo.push(e.to);
                    queued[e.to] = 1;
                }
            }
        }
    }
    return phi;
}

double dual_distance(const PathGraph& graph, int x, int y) {
    // phi(u) = min over neighbors of phi(v) + len from y; the sup of
    // phi(x) - phi(y) over admissible phi is attained by this fixed point.
    const double d = dual_distance_field(graph, y)[x];
    if (!(d < kInf))
        throw std::runtime_error("dual_distance: target unreachable (disconnected graph)");
    return d;
}

DistanceReport distance_report(const PathGraph& graph, int x, int y) {
    DistanceReport rep;
    rep.source = x;
    rep.target = y;
    const SearchResult primal = dijkstra(graph, x, true, y);
    rep.d_w_primal = primal.dist[y];
    if (!(rep.d_w_primal < kInf))
        throw std::runtime_error("distance_report: target unreachable (disconnected graph)");
    rep.d_w_dual = dual_distance(graph, x, y);
    rep.rel_gap = std::abs(rep.d_w_primal - rep.d_w_dual) /
                  std::max(rep.d_w_primal, std::numeric_limits<double>::min());
    rep.consistent = rep.rel_gap <= 1e-12;
    for (int v = y; v != -1; v = primal.prev[v]) rep.path.push_back(v);
    std::reverse(rep.path.begin(), rep.path.end());
    return rep;
}

ComparisonReport comparison_bounds_check(const PathGraph& graph, const ScalarField& w,
                                         const std::vector<std::pair<int, int>>& pairs) {
    require_same_mesh(graph.mesh, w.mesh, "comparison_bounds_check");
    const double lo = std::exp(w.values.minCoeff());
    const double hi = std::exp(w.values.maxCoeff());
    // Group by source so each source costs two single-source sweeps.
    std::vector<std::vector<int>> targets_of(graph.node_count());
    for (const auto& [x, y] : pairs) {
        if (x < 0 || x >= graph.node_count() || y < 0 || y >= graph.node_count())
            throw std::invalid_argument("comparison_bounds_check: node id out of range");
        targets_of[x].push_back(y);
    }
    ComparisonReport rep;
    double scale = 0.0;
    for (int x = 0; x < graph.node_count(); ++x) {
        if (targets_of[x].empty()) continue;
        const std::vector<double> dw = distance_field(graph, x, true);
        const std::vector<double> d0 = distance_field(graph, x, false);
        for (int y : targets_of[x]) {
            const double below = lo * d0[y] - dw[y]; // > 0 breaches the lower bound
            const double above = dw[y] - hi * d0[y]; // > 0 breaches the upper bound
            rep.max_violation = std::max({rep.max_violation, below, above});
            scale = std::max({scale, dw[y], hi * d0[y]});
            ++rep.checked;
        }
    }
    // Both sides are equal in the reals when a pair sits on the weight's min
    // or max set, so allow the summation rounding that equality exposes; a
    // genuine breach is shorter-path-sized, many orders above this slack.
    rep.pass = rep.max_violation <= 1e-12 * std::max(scale, 1e-300);
    return rep;
}

VolumeGrowthVerdict volume_growth_condition(const std::function<double(double)>& p,
                                            const std::function<double(double)>& q,
                                            double r_max, int grid) {
    if (!(r_max > 0.0) || grid < 2)
        throw std::invalid_argument("volume_growth_condition: need r_max > 0 and grid >= 2");
    const double h = r_max / grid;
    std::vector<double> r(grid + 1), f(grid + 1);
    std::vector<double> eq(grid + 1);
    for (int i = 0; i <= grid; ++i) {
        r[i] = i * h;
        const double qi = q(r[i]);
        if (!(qi >= 0.0) || !(p(r[i]) >= 0.0))
            throw std::invalid_argument("volume_growth_condition: p, q must be >= 0 on [0, r_max]");
        eq[i] = std::exp(-qi);
    }
    f[0] = 0.0;
    for (int i = 1; i <= grid; ++i) {
        f[i] = f[i - 1] + 0.5 * h * (eq[i - 1] + eq[i]);
        if (!(f[i] > f[i - 1]))
            throw std::runtime_error("volume_growth_condition: quadrature gave non-increasing f");
    }

    VolumeGrowthVerdict v;
    v.window_i_lo = 0.5 * r_max;
    v.window_i_hi = r_max;
    v.min_f_over_r = kInf;
    for (int i = 0; i <= grid; ++i)
        if (r[i] >= v.window_i_lo) v.min_f_over_r = std::min(v.min_f_over_r, f[i] / r[i]);

    // f^{-1} by linear interpolation on the same grid; evaluate on the outer
    // half of f's range so the inverse never extrapolates.
    v.window_ii_lo = 0.5 * f[grid];
    v.window_ii_hi = f[grid];
    v.max_p_over_r2 = 0.0;
    auto f_inv = [&](double y) {
        const auto it = std::lower_bound(f.begin(), f.end(), y);
        const int j = std::min<int>(static_cast<int>(it - f.begin()), grid);
        if (j == 0) return 0.0;
        const double t = (y - f[j - 1]) / (f[j] - f[j - 1]);
        return r[j - 1] + t * (r[j] - r[j - 1]);
    };
    for (int i = 0; i <= grid; ++i) {
        const double y = v.window_ii_lo + (v.window_ii_hi - v.window_ii_lo) * i / grid;
        v.max_p_over_r2 = std::max(v.max_p_over_r2, p(f_inv(y)) / (y * y));
    }

    v.satisfied = v.min_f_over_r >= v.threshold_lower && v.max_p_over_r2 <= v.threshold_upper;
    return v;
}

} // namespace gammatc
