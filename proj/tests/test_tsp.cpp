#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "tubetrack/rng.hpp"
#include "tubetrack/tsp.hpp"

using namespace tubetrack;

namespace {

struct EdgeSpec {
    int a, b;
    double wall;
};

// Hand-built graph; cost_cyl stays at the 0.5 default, lambda defaults to 0
// here so edge costs equal the wall terms unless a test overrides lambda.
RegionAdjacencyGraph make_graph(int nodes, const std::vector<EdgeSpec>& edges,
                                const std::vector<Vec3>& centroids) {
    RegionAdjacencyGraph g;
    g.node_count = nodes;
    g.lambda = 0.0;
    g.centroid_mm.assign(nodes + 1, Vec3::Zero());
    for (int i = 1; i <= nodes; ++i) g.centroid_mm[i] = centroids[i - 1];
    g.adjacency.assign(nodes + 1, {});
    for (const EdgeSpec& e : edges) {
        RagEdge edge;
        edge.a = std::min(e.a, e.b);
        edge.b = std::max(e.a, e.b);
        edge.cost_wall = e.wall;
        const int idx = static_cast<int>(g.edges.size());
        g.edges.push_back(edge);
        g.adjacency[edge.a].push_back({edge.b, idx});
        g.adjacency[edge.b].push_back({edge.a, idx});
    }
    return g;
}

std::vector<Vec3> line_centroids(int n, double step) {
    std::vector<Vec3> c;
    for (int i = 0; i < n; ++i) c.push_back(Vec3(i * step, 0, 0));
    return c;
}

MustPassNodeSet mp_nodes(std::vector<int> ids) {
    MustPassNodeSet mp;
    mp.node_ids = std::move(ids);
    return mp;
}

}  // namespace

TEST_SUITE("tsp") {

TEST_CASE("shortest path on a chain") {
    const auto g = make_graph(4, {{1, 2, 1.0}, {2, 3, 2.0}, {3, 4, 3.0}}, line_centroids(4, 10));
    const auto sp = dijkstra_shortest_path(g, 1, 4);
    REQUIRE(sp.has_value());
    CHECK(sp->cost == doctest::Approx(6.0));
    CHECK(sp->nodes == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("cheaper detours beat direct edges") {
    const auto g = make_graph(
        3, {{1, 2, 5.0}, {1, 3, 1.0}, {3, 2, 1.0}}, line_centroids(3, 10));
    const auto sp = dijkstra_shortest_path(g, 1, 2);
    REQUIRE(sp.has_value());
    CHECK(sp->cost == doctest::Approx(2.0));
    CHECK(sp->nodes == std::vector<int>{1, 3, 2});
}

TEST_CASE("equal-cost ties prefer fewer hops") {
    const auto g = make_graph(
        3, {{1, 2, 2.0}, {1, 3, 1.0}, {3, 2, 1.0}}, line_centroids(3, 10));
    const auto sp = dijkstra_shortest_path(g, 1, 2);
    REQUIRE(sp.has_value());
    CHECK(sp->cost == doctest::Approx(2.0));
    CHECK(sp->nodes == std::vector<int>{1, 2});
}

TEST_CASE("equal cost and hops tie-break on the smaller predecessor") {
    // diamond: 1-2-4 and 1-3-4, all edges cost 1
    const auto g = make_graph(
        4, {{1, 2, 1.0}, {1, 3, 1.0}, {2, 4, 1.0}, {3, 4, 1.0}}, line_centroids(4, 10));
    const auto sp = dijkstra_shortest_path(g, 1, 4);
    REQUIRE(sp.has_value());
    CHECK(sp->cost == doctest::Approx(2.0));
    CHECK(sp->nodes == std::vector<int>{1, 2, 4});
}

TEST_CASE("unreachable, identical, and invalid endpoints") {
    const auto g = make_graph(4, {{1, 2, 1.0}}, line_centroids(4, 10));
    CHECK_FALSE(dijkstra_shortest_path(g, 1, 4).has_value());
    const auto self = dijkstra_shortest_path(g, 2, 2);
    REQUIRE(self.has_value());
    CHECK(self->cost == 0.0);
    CHECK(self->nodes.empty());
    CHECK_THROWS_AS(dijkstra_shortest_path(g, 0, 2), TrackError);
    CHECK_THROWS_AS(dijkstra_shortest_path(g, 1, 5), TrackError);
}

TEST_CASE("dijkstra agrees with Bellman-Ford on a random graph") {
    Rng rng(616);
    const int n = 40;
    std::vector<EdgeSpec> edges;
    for (int a = 1; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b)
            if (rng.next_double() < 0.08) edges.push_back({a, b, rng.uniform(0.01, 1.0)});
    std::vector<Vec3> cents(n);
    for (auto& c : cents) c = Vec3(rng.uniform(0, 100), rng.uniform(0, 100), rng.uniform(0, 100));
    const auto g = make_graph(n, edges, cents);
    const auto oracle = oracles::bellman_ford(g, 1);
    for (int dst = 2; dst <= n; ++dst) {
        const auto sp = dijkstra_shortest_path(g, 1, dst);
        if (std::isinf(oracle[dst])) {
            CHECK_FALSE(sp.has_value());
        } else {
            REQUIRE(sp.has_value());
            CHECK(sp->cost == oracle[dst]);  // identical accumulation, bitwise
        }
    }
}

TEST_CASE("terminal cost matrix branches") {
    SUBCASE("distant pairs use the Euclidean proxy") {
        // two isolated nodes, 100mm apart, delta = 50
        const auto g = make_graph(2, {}, {Vec3(0, 0, 0), Vec3(100, 0, 0)});
        const auto tg = build_tsp_graph(g, mp_nodes({}), 1, 2, 50.0);
        REQUIRE(tg.terminals == std::vector<int>{1, 2});
        CHECK(tg.cost(0, 1) == 2.0);  // d / delta, exact
        CHECK(tg.M == 1.0);           // no reachable qualifying pair
        CHECK(tg.cost(0, 0) == 0.0);
    }
    SUBCASE("nearby but unreachable pairs are penalized above any graph cost") {
        const auto g = make_graph(2, {}, {Vec3(0, 0, 0), Vec3(40, 0, 0)});
        const auto tg = build_tsp_graph(g, mp_nodes({}), 1, 2, 50.0);
        CHECK(tg.cost(0, 1) == doctest::Approx(1.8).epsilon(1e-12));  // 40/50 + 1
    }
    SUBCASE("reachable qualifying pairs normalize by the maximum graph cost") {
        // chain 1-2-3-4 with wall costs 0.25 / 0.5 / 0.75, centroids 30mm apart
        const auto g = make_graph(
            4, {{1, 2, 0.25}, {2, 3, 0.5}, {3, 4, 0.75}}, line_centroids(4, 30));
        const auto tg = build_tsp_graph(g, mp_nodes({2, 3}), 1, 4, 50.0);
        REQUIRE(tg.terminals == std::vector<int>{1, 4, 2, 3});
        CHECK(tg.M == doctest::Approx(0.75));
        CHECK(tg.cost(0, 2) == doctest::Approx(0.25 / 0.75).epsilon(1e-12));
        CHECK(tg.cost(2, 3) == doctest::Approx(0.5 / 0.75).epsilon(1e-12));
        CHECK(tg.cost(1, 3) == 1.0);  // the maximal qualifying pair, exact
        CHECK(tg.cost(0, 1) == doctest::Approx(90.0 / 50.0).epsilon(1e-12));
        CHECK(tg.cost(0, 3) == doctest::Approx(60.0 / 50.0).epsilon(1e-12));
        CHECK(tg.cost(1, 2) == doctest::Approx(60.0 / 50.0).epsilon(1e-12));
        // symmetry and zero diagonal
        for (int i = 0; i < 4; ++i) {
            CHECK(tg.cost(i, i) == 0.0);
            for (int j = 0; j < 4; ++j) CHECK(tg.cost(i, j) == tg.cost(j, i));
        }
        // stored paths exist for qualifying reachable pairs, both directions
        CHECK(tg.stored_path(0, 2) == std::vector<int>{1, 2});
        CHECK(tg.stored_path(2, 0) == std::vector<int>{2, 1});
        CHECK(tg.stored_path(0, 1).empty());  // non-qualifying: not stored
        // raw graph costs recorded for stored pairs
        CHECK(tg.graph_cost(0, 2) == doctest::Approx(0.25));
        CHECK(std::isnan(tg.graph_cost(0, 1)));
    }
}

TEST_CASE("open tour solver returns the start-to-end order") {
    // five terminals on a line; costs are Euclidean, so the sorted order wins
    TspGraph tg;
    tg.terminals = {11, 22, 33, 44, 55};  // start 11, end 22, middles 33/44/55
    const double pos[] = {0.0, 100.0, 75.0, 25.0, 50.0};
    const int t = 5;
    tg.cost = Eigen::MatrixXd::Zero(t, t);
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < t; ++j) tg.cost(i, j) = std::abs(pos[i] - pos[j]);
    tg.stored_paths.assign(t * t, {});
    const auto order = solve_open_tsp(tg);
    CHECK(order == std::vector<int>{11, 44, 55, 33, 22});
    CHECK(open_order_cost(tg, order) == doctest::Approx(100.0));

    // two terminals degenerate to the direct pair
    TspGraph two;
    two.terminals = {7, 9};
    two.cost = Eigen::MatrixXd::Zero(2, 2);
    two.cost(0, 1) = two.cost(1, 0) = 3.0;
    two.stored_paths.assign(4, {});
    CHECK(solve_open_tsp(two) == std::vector<int>{7, 9});
}

TEST_CASE("nearest-fragment never loses badly on tube-like instances") {
    Rng check(424242);
    for (int inst = 0; inst < 20; ++inst) {
        Rng rng(hash_counter(31337, inst));
        const int t = 7;
        TspGraph tg;
        for (int i = 0; i < t; ++i) tg.terminals.push_back(i + 1);
        std::vector<double> s(t), off(t);
        s[0] = 0.0;
        off[0] = 0.0;
        s[1] = 180.0;
        off[1] = 0.0;
        for (int i = 2; i < t; ++i) {
            s[i] = rng.uniform(0.0, 180.0);
            off[i] = rng.uniform(-12.0, 12.0);
        }
        tg.cost = Eigen::MatrixXd::Zero(t, t);
        for (int i = 0; i < t; ++i)
            for (int j = i + 1; j < t; ++j)
                tg.cost(i, j) = tg.cost(j, i) = std::hypot(s[i] - s[j], off[i] - off[j]);
        tg.stored_paths.assign(t * t, {});
        const auto order = solve_open_tsp(tg);
        const double got = open_order_cost(tg, order);
        const double best = oracles::exhaustive_open_cost(tg.cost);
        CHECK(got <= 1.3 * best + 1e-9);
    }
}

TEST_CASE("stitching concatenates stored legs and drops duplicate junctions") {
    const auto g = make_graph(
        4, {{1, 2, 0.25}, {2, 3, 0.5}, {3, 4, 0.75}}, line_centroids(4, 30));
    const auto tg = build_tsp_graph(g, mp_nodes({2, 3}), 1, 4, 50.0);
    const auto order = solve_open_tsp(tg);
    REQUIRE(order.front() == 1);
    REQUIRE(order.back() == 4);
    const TrackedPath path = stitch_full_path(g, tg, order);
    CHECK(path.nodes == std::vector<int>{1, 2, 3, 4});
    CHECK(path.total_cost == doctest::Approx(0.25 + 0.5 + 0.75));
    REQUIRE(path.polyline_mm.size() == 4);
    CHECK((path.polyline_mm[0] - Vec3(0, 0, 0)).norm() < 1e-12);
    CHECK((path.polyline_mm[3] - Vec3(90, 0, 0)).norm() < 1e-12);

    // a leg without a stored path falls back to a fresh graph search
    const TrackedPath direct = stitch_full_path(g, tg, {1, 4});
    CHECK(direct.nodes == std::vector<int>{1, 2, 3, 4});

    // unreachable consecutive nodes raise a descriptive error
    const auto g2 = make_graph(3, {{1, 2, 1.0}}, line_centroids(3, 30));
    const auto tg2 = build_tsp_graph(g2, mp_nodes({}), 1, 2, 50.0);
    CHECK_THROWS_AS(stitch_full_path(g2, tg2, {1, 3}), TrackError);
}

}  // TEST_SUITE
