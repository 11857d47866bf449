#include "gammatc/metricgeom.hpp"
#include "gammatc/models.hpp"
#include "gammatc/rng.hpp"

#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace gammatc;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

// reference all-targets shortest paths by plain Bellman-Ford relaxation
std::vector<double> bellman_ford(const PathGraph& g, int source, bool conformal) {
    const int n = g.node_count();
    std::vector<double> dist(static_cast<std::size_t>(n), 1e300);
    dist[static_cast<std::size_t>(source)] = 0.0;
    for (int round = 0; round < n; ++round) {
        bool changed = false;
        for (int u = 0; u < n; ++u) {
            if (dist[static_cast<std::size_t>(u)] >= 1e300) continue;
            for (const auto& e : g.adj[static_cast<std::size_t>(u)]) {
                const double len = conformal ? e.len : e.base_len;
                const double cand = dist[static_cast<std::size_t>(u)] + len;
                if (cand < dist[static_cast<std::size_t>(e.to)] - 1e-18) {
                    dist[static_cast<std::size_t>(e.to)] = cand;
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }
    return dist;
}

PathGraph torus_graph(int n, const std::string& weight_id, double amp, ScalarField* w_out = nullptr) {
    auto mesh = build_torus_mesh(n, n, kTau, kTau);
    auto metric = sample_metric(mesh, [](const std::array<double, 2>&) {
        return std::array<double, 3>{1.0, 0.0, 1.0};
    });
    auto w = make_weight(mesh, weight_id, amp);
    if (w_out) *w_out = w;
    return build_path_graph(metric, w);
}

} // namespace

TEST_CASE("flat graph edge lengths: axis h and diagonal h sqrt 2") {
    auto g = torus_graph(8, "zero", 0.0);
    const double h = kTau / 8;
    int axis = 0, diag = 0;
    for (const auto& e : g.adj[0]) {
        if (std::abs(e.base_len - h) < 1e-12) ++axis;
        if (std::abs(e.base_len - h * std::sqrt(2.0)) < 1e-12) ++diag;
        CHECK(e.len == e.base_len); // w = 0
    }
    CHECK(axis == 4);
    CHECK(diag == 4);
}

TEST_CASE("dijkstra and the dual relaxation agree with bellman-ford") {
    ScalarField w;
    auto g = torus_graph(8, "harmonic", 0.5, &w);
    for (int source : {0, 13, 40}) {
        const auto ref_w = bellman_ford(g, source, true);
        const auto ref_0 = bellman_ford(g, source, false);
        const auto dj = distance_field(g, source, true);
        const auto dj0 = distance_field(g, source, false);
        const auto dual = dual_distance_field(g, source);
        for (int t = 0; t < g.node_count(); ++t) {
            CHECK(dj[static_cast<std::size_t>(t)] ==
                  doctest::Approx(ref_w[static_cast<std::size_t>(t)]).epsilon(1e-12));
            CHECK(dj0[static_cast<std::size_t>(t)] ==
                  doctest::Approx(ref_0[static_cast<std::size_t>(t)]).epsilon(1e-12));
            CHECK(dual[static_cast<std::size_t>(t)] ==
                  doctest::Approx(ref_w[static_cast<std::size_t>(t)]).epsilon(1e-12));
        }
    }
}

TEST_CASE("circle distances are exact multiples of the spacing") {
    auto mesh = build_circle_mesh(24, kTau);
    auto metric = sample_metric(mesh, [](const std::array<double, 2>&) {
        return std::array<double, 3>{1.0, 0.0, 0.0};
    });
    auto g = build_path_graph(metric, zero_field(mesh));
    const double h = kTau / 24;
    for (int j : {1, 5, 12, 20}) {
        const double want = h * std::min(j, 24 - j);
        CHECK(base_distance(g, 0, j) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("flat torus distance realizes the octile formula") {
    auto g = torus_graph(32, "zero", 0.0);
    const double h = kTau / 32;
    auto mesh = g.mesh;
    // displacement (3, 4) cells: 3 diagonal moves + 1 axis move
    const int target = mesh->node_at(3, 4);
    const double want = h * (3.0 * std::sqrt(2.0) + 1.0);
    CHECK(conformal_distance(g, 0, target) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("constant weight scales every distance by exactly e^c") {
    auto g = torus_graph(12, "const", 0.37);
    CounterRng rng(31337, 0);
    for (int trial = 0; trial < 25; ++trial) {
        const int x = static_cast<int>(rng.below(144));
        const int y = static_cast<int>(rng.below(144));
        const double d0 = base_distance(g, x, y);
        const double dw = conformal_distance(g, x, y);
        CHECK(dw == doctest::Approx(std::exp(0.37) * d0).epsilon(1e-12));
    }
}

TEST_CASE("pointwise ordering of weights orders the distances") {
    ScalarField w1, w2;
    auto g1 = torus_graph(10, "harmonic", 0.2, &w1);
    auto g2 = torus_graph(10, "const", 0.2, &w2); // 0.2 >= 0.2 cos x everywhere
    CounterRng rng(8, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const int x = static_cast<int>(rng.below(100));
        const int y = static_cast<int>(rng.below(100));
        CHECK(conformal_distance(g1, x, y) <= conformal_distance(g2, x, y) + 1e-12);
    }
}

TEST_CASE("triangle inequality on random triples") {
    ScalarField w;
    auto g = torus_graph(12, "harmonic", 0.4, &w);
    CounterRng rng(55, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const int a = static_cast<int>(rng.below(144));
        const int b = static_cast<int>(rng.below(144));
        const int c = static_cast<int>(rng.below(144));
        const double ab = conformal_distance(g, a, b);
        const double bc = conformal_distance(g, b, c);
        const double ac = conformal_distance(g, a, c);
        CHECK(ac <= ab + bc + 1e-12);
    }
}

TEST_CASE("distance report: primal equals dual and the path is a real walk") {
    auto model = make_model("conformal_t2", 32);
    auto w = make_weight(model.mesh, "harmonic", 0.3);
    auto g = build_path_graph(model.metric, w);
    const auto rep = distance_report(g, 3, 700);
    CHECK(rep.consistent);
    CHECK(rep.rel_gap <= 1e-12);
    CHECK(rep.path.front() == 3);
    CHECK(rep.path.back() == 700);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < rep.path.size(); ++i) {
        bool found = false;
        for (const auto& e : g.adj[static_cast<std::size_t>(rep.path[i])])
            if (e.to == rep.path[i + 1]) {
                acc += e.len;
                found = true;
                break;
            }
        CHECK(found);
    }
    CHECK(acc == doctest::Approx(rep.d_w_primal).epsilon(1e-12));
}

TEST_CASE("comparison bounds are exact on the graph") {
    ScalarField w;
    auto g = torus_graph(12, "harmonic", 0.6, &w);
    std::vector<std::pair<int, int>> pairs;
    CounterRng rng(2, 0);
    for (int i = 0; i < 60; ++i)
        pairs.emplace_back(static_cast<int>(rng.below(144)), static_cast<int>(rng.below(144)));
    const auto rep = comparison_bounds_check(g, w, pairs);
    CHECK(rep.pass);
    CHECK(rep.max_violation <= 1e-10); // at most summation rounding
    CHECK(rep.checked == 60);
}

TEST_CASE("shortest path tree batching matches single queries") {
    ScalarField w;
    auto g = torus_graph(10, "harmonic", 0.3, &w);
    const auto tree = shortest_path_tree(g, 17, true);
    for (int t : {0, 5, 42, 99}) {
        CHECK(tree.dist[static_cast<std::size_t>(t)] ==
              doctest::Approx(conformal_distance(g, 17, t)).epsilon(1e-12));
        const auto path = extract_path(tree, t);
        CHECK(path.front() == 17);
        CHECK(path.back() == t);
    }
}

TEST_CASE("volume growth verdicts on three closed-form profiles") {
    // q = 0, p = 0: f(r) = r, both windows trivially fine
    const auto a = volume_growth_condition([](double) { return 0.0; },
                                           [](double) { return 0.0; }, 10.0, 2000);
    CHECK(a.satisfied);
    CHECK(a.min_f_over_r == doctest::Approx(1.0).epsilon(1e-6));

    // q = 0, p = 100 r^2: ratio p(f^{-1}(r))/r^2 = 100 stays under 1e3
    const auto b = volume_growth_condition([](double r) { return 100.0 * r * r; },
                                           [](double) { return 0.0; }, 10.0, 2000);
    CHECK(b.satisfied);
    CHECK(b.max_p_over_r2 == doctest::Approx(100.0).epsilon(1e-3));

    // q = r saturates f near 1; p = e^{2r} then explodes on f's range
    const auto c = volume_growth_condition([](double r) { return std::exp(2.0 * r); },
                                           [](double r) { return r; }, 20.0, 4000);
    CHECK_FALSE(c.satisfied);
    CHECK(c.max_p_over_r2 > 1e3);

    // a flat quadrature (e^{-q} underflows) is a detectable misuse
    CHECK_THROWS_AS((void)volume_growth_condition([](double) { return 0.0; },
                                                  [](double) { return 800.0; }, 10.0, 100),
                    std::runtime_error);
}
