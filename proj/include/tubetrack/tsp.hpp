#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "tubetrack/rag.hpp"
#include "tubetrack/sampling.hpp"

namespace tubetrack {

struct PathResult {
    std::vector<int> nodes;  // src..dst inclusive; empty when src == dst
    double cost = 0.0;
};

/// Deterministic Dijkstra on the region adjacency graph under the total edge
/// cost. Ties are broken by fewer hops, then by smaller predecessor id.
/// Returns nullopt when dst is unreachable; src == dst yields an empty path
/// with cost 0.
std::optional<PathResult> dijkstra_shortest_path(const RegionAdjacencyGraph& g, int src, int dst);

/// Simplified terminal graph for the open-tour solver. Terminal 0 is the
/// start node, terminal 1 the end node, the rest the must-pass nodes.
/// For terminal pairs with centroid distance d <= delta the cost is the
/// Dijkstra cost normalized by M (the maximum such cost over reachable
/// qualifying pairs); unreachable qualifying pairs are penalized with
/// d/delta + 1; pairs with d > delta use the lighter Euclidean proxy
/// d/delta (always > 1).
struct TspGraph {
    std::vector<int> terminals;  // RAG node ids
    Eigen::MatrixXd cost;        // symmetric, zero diagonal
    Eigen::MatrixXd graph_cost;  // raw Dijkstra costs; NaN where not computed
    double delta_mm = 0.0;
    double M = 1.0;
    /// stored_paths[i * T + j]: RAG node path for qualifying reachable pairs
    /// (both orders filled); empty elsewhere.
    std::vector<std::vector<int>> stored_paths;

    int start_node() const { return terminals.front(); }
    int end_node() const { return terminals[1]; }
    const std::vector<int>& stored_path(int i, int j) const {
        return stored_paths[static_cast<std::size_t>(i) * terminals.size() + j];
    }
};

TspGraph build_tsp_graph(const RegionAdjacencyGraph& g, const MustPassNodeSet& mp, int start,
                         int end, double delta_mm, int threads = 0);

/// Open-tour order over the terminals, from start to end, visiting each
/// exactly once. Uses the dummy-node closure (zero-cost edges to start and
/// end, 1e9 elsewhere) and the nearest-fragment merge heuristic with
/// deterministic lexicographic tie-breaking.
std::vector<int> solve_open_tsp(const TspGraph& tg);

/// Cost of a terminal visiting order under tg.cost (open path, no closure).
double open_order_cost(const TspGraph& tg, const std::vector<int>& order);

struct TrackedPath {
    std::vector<int> nodes;  // RAG node ids; consecutive entries are adjacent
    std::vector<Vec3> polyline_mm;
    double total_cost = 0.0;
};

/// Concatenates per-leg shortest paths for consecutive terminals in `order`,
/// dropping duplicated junction nodes. Legs without a stored path get a fresh
/// Dijkstra run; an unreachable leg raises an error naming the pair.
TrackedPath stitch_full_path(const RegionAdjacencyGraph& g, const TspGraph& tg,
                             const std::vector<int>& order);

}  // namespace tubetrack
