#include "tubetrack/tsp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <string>
#include <tuple>

#include "tubetrack/parallel.hpp"

namespace tubetrack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDummyCost = 1e9;

std::string node_pair(int a, int b) {
    return std::to_string(a) + " and " + std::to_string(b);
}

}  // namespace

std::optional<PathResult> dijkstra_shortest_path(const RegionAdjacencyGraph& g, int src, int dst) {
    if (!g.has_node(src) || !g.has_node(dst))
        throw TrackError("tsp", "shortest path endpoint outside the graph: " + node_pair(src, dst));
    if (src == dst) return PathResult{{}, 0.0};

    const std::size_t n = static_cast<std::size_t>(g.node_count) + 1;
    std::vector<double> dist(n, kInf);
    std::vector<int> hops(n, std::numeric_limits<int>::max());
    std::vector<int> pred(n, 0);

    using Entry = std::tuple<double, int, int>;  // (dist, hops, node)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
    dist[src] = 0.0;
    hops[src] = 0;
    queue.push({0.0, 0, src});

    while (!queue.empty()) {
        const auto [d, h, u] = queue.top();
        queue.pop();
        if (d != dist[u] || h != hops[u]) continue;  // stale entry
        if (u == dst) break;
        for (const auto& [v, ei] : g.adjacency[u]) {
            const double nd = d + g.edge_cost(ei);
            const int nh = h + 1;
            if (nd < dist[v] || (nd == dist[v] && nh < hops[v])) {
                dist[v] = nd;
                hops[v] = nh;
                pred[v] = u;
                queue.push({nd, nh, v});
            } else if (nd == dist[v] && nh == hops[v] && u < pred[v]) {
                pred[v] = u;
            }
        }
    }
    if (dist[dst] == kInf) return std::nullopt;

    PathResult res;
    res.cost = dist[dst];
    for (int v = dst; v != src; v = pred[v]) res.nodes.push_back(v);
    res.nodes.push_back(src);
    std::reverse(res.nodes.begin(), res.nodes.end());
    return res;
}

TspGraph build_tsp_graph(const RegionAdjacencyGraph& g, const MustPassNodeSet& mp, int start,
                         int end, double delta_mm, int threads) {
    if (start == end) throw TrackError("tsp", "start and end nodes must differ");
    if (!g.has_node(start) || !g.has_node(end))
        throw TrackError("tsp", "start/end outside the graph: " + node_pair(start, end));
    if (delta_mm <= 0.0) throw TrackError("tsp", "delta must be positive");

    TspGraph tg;
    tg.delta_mm = delta_mm;
    tg.terminals = {start, end};
    for (int id : mp.node_ids) {
        if (id == start || id == end) continue;
        if (!g.has_node(id)) throw TrackError("tsp", "must-pass node outside the graph: " + std::to_string(id));
        tg.terminals.push_back(id);
    }

    const int t = static_cast<int>(tg.terminals.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    tg.cost = Eigen::MatrixXd::Zero(t, t);
    tg.graph_cost = Eigen::MatrixXd::Constant(t, t, nan);
    tg.stored_paths.assign(static_cast<std::size_t>(t) * t, {});

    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < t; ++i)
        for (int j = i + 1; j < t; ++j) pairs.push_back({i, j});

    std::vector<double> euclid(pairs.size(), 0.0);
    std::vector<double> graph_cost(pairs.size(), nan);
    std::vector<std::vector<int>> paths(pairs.size());

    parallel_for(pairs.size(), [&](std::size_t k) {
        const auto [i, j] = pairs[k];
        const Vec3& pi = g.centroid_mm[tg.terminals[i]];
        const Vec3& pj = g.centroid_mm[tg.terminals[j]];
        euclid[k] = (pi - pj).norm();
        if (euclid[k] > delta_mm) return;
        auto sp = dijkstra_shortest_path(g, tg.terminals[i], tg.terminals[j]);
        if (!sp) return;
        graph_cost[k] = sp->cost;
        paths[k] = std::move(sp->nodes);
    }, threads);

    double max_cost = 0.0;
    bool any = false;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        if (std::isnan(graph_cost[k])) continue;
        max_cost = std::max(max_cost, graph_cost[k]);
        any = true;
    }
    tg.M = (any && max_cost > 0.0) ? max_cost : 1.0;

    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [i, j] = pairs[k];
        double c;
        if (euclid[k] > delta_mm) {
            c = euclid[k] / delta_mm;
        } else if (std::isnan(graph_cost[k])) {
            c = euclid[k] / delta_mm + 1.0;  // unreachable but nearby: penalized, not fatal
        } else {
            c = graph_cost[k] / tg.M;
            tg.graph_cost(i, j) = tg.graph_cost(j, i) = graph_cost[k];
            auto& fwd = tg.stored_paths[static_cast<std::size_t>(i) * t + j];
            auto& rev = tg.stored_paths[static_cast<std::size_t>(j) * t + i];
            fwd = std::move(paths[k]);
            rev.assign(fwd.rbegin(), fwd.rend());
        }
        tg.cost(i, j) = tg.cost(j, i) = c;
    }
    return tg;
}

std::vector<int> solve_open_tsp(const TspGraph& tg) {
    const int t = static_cast<int>(tg.terminals.size());
    if (t < 2) throw TrackError("tsp", "need at least the start and end terminals");

    // Internal ids: 0 = dummy, 1..t = terminal index + 1. The dummy closes
    // the open tour: free edges to start/end, prohibitive elsewhere.
    const int n = t + 1;
    auto link_cost = [&](int a, int b) -> double {
        if (a > b) std::swap(a, b);
        if (a == 0) return (b <= 2) ? 0.0 : kDummyCost;
        return tg.cost(a - 1, b - 1);
    };

    std::vector<std::deque<int>> fragments(n);
    std::vector<int> frag_of(n);
    for (int i = 0; i < n; ++i) {
        fragments[i] = {i};
        frag_of[i] = i;
    }

    int remaining = n;
    while (remaining > 1) {
        double best_cost = kInf;
        int best_a = -1, best_b = -1;
        for (int a = 0; a < n; ++a) {
            const auto& fa = fragments[frag_of[a]];
            if (fa.front() != a && fa.back() != a) continue;  // interior node
            for (int b = a + 1; b < n; ++b) {
                if (frag_of[a] == frag_of[b]) continue;
                const auto& fb = fragments[frag_of[b]];
                if (fb.front() != b && fb.back() != b) continue;
                const double c = link_cost(a, b);
                if (c < best_cost) {
                    best_cost = c;
                    best_a = a;
                    best_b = b;
                }
                // ties resolve to the lexicographically smallest (a, b); the
                // scan order guarantees it, so strict < is enough
            }
        }

        auto& fa = fragments[frag_of[best_a]];
        auto& fb = fragments[frag_of[best_b]];
        if (fa.back() != best_a) std::reverse(fa.begin(), fa.end());
        if (fb.front() != best_b) std::reverse(fb.begin(), fb.end());
        const int target = frag_of[best_a];
        for (int v : fb) {
            fa.push_back(v);
            frag_of[v] = target;
        }
        fb.clear();
        --remaining;
    }

    const auto& tour = fragments[frag_of[0]];
    const std::size_t k =
        static_cast<std::size_t>(std::find(tour.begin(), tour.end(), 0) - tour.begin());

    // Cut the closed tour at the dummy: walk the cycle from the node after it.
    std::vector<int> order;
    order.reserve(t);
    for (std::size_t s = 1; s <= tour.size() - 1; ++s)
        order.push_back(tour[(k + s) % tour.size()]);
    if (order.front() != 1) std::reverse(order.begin(), order.end());
    if (order.front() != 1 || order.back() != 2)
        throw TrackError("tsp", "dummy-node tour did not terminate at the start/end pair");

    for (int& v : order) v = tg.terminals[v - 1];
    return order;
}

double open_order_cost(const TspGraph& tg, const std::vector<int>& order) {
    const int t = static_cast<int>(tg.terminals.size());
    auto index_of = [&](int node) {
        for (int i = 0; i < t; ++i)
            if (tg.terminals[i] == node) return i;
        throw TrackError("tsp", "order contains a node outside the terminal set: " + std::to_string(node));
    };
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < order.size(); ++k)
        total += tg.cost(index_of(order[k]), index_of(order[k + 1]));
    return total;
}

TrackedPath stitch_full_path(const RegionAdjacencyGraph& g, const TspGraph& tg,
                             const std::vector<int>& order) {
    if (order.size() < 2) throw TrackError("tsp", "stitching needs at least two ordered nodes");
    const int t = static_cast<int>(tg.terminals.size());
    auto index_of = [&](int node) {
        for (int i = 0; i < t; ++i)
            if (tg.terminals[i] == node) return i;
        return -1;
    };

    TrackedPath out;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        const int a = order[k], b = order[k + 1];
        const int ia = index_of(a), ib = index_of(b);

        std::vector<int> leg;
        double leg_cost = 0.0;
        if (ia >= 0 && ib >= 0 && !tg.stored_path(ia, ib).empty()) {
            leg = tg.stored_path(ia, ib);
            leg_cost = tg.graph_cost(ia, ib);
        } else {
            auto sp = dijkstra_shortest_path(g, a, b);
            if (!sp)
                throw TrackError("tsp", "consecutive ordered nodes are unreachable in the "
                                        "region adjacency graph: " + node_pair(a, b));
            leg = std::move(sp->nodes);
            leg_cost = sp->cost;
        }

        out.total_cost += leg_cost;
        const std::size_t skip = out.nodes.empty() ? 0 : 1;  // drop duplicated junction
        out.nodes.insert(out.nodes.end(), leg.begin() + skip, leg.end());
    }

    out.polyline_mm.reserve(out.nodes.size());
    for (int id : out.nodes) out.polyline_mm.push_back(g.centroid_mm[id]);
    return out;
}

}  // namespace tubetrack
