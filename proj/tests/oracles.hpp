#pragma once

// Brute-force reference implementations used to validate the optimized
// library code. Each oracle mirrors the arithmetic of its counterpart
// closely enough that results are expected to match exactly (bitwise for
// float/double outputs), not merely within a tolerance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tubetrack/curve.hpp"
#include "tubetrack/rag.hpp"
#include "tubetrack/volume.hpp"

namespace tubetrack::oracles {

/// O(n * m) Euclidean distance transform: for every voxel take the minimum
/// squared lattice distance to any obstacle voxel, then sqrt and scale —
/// the same final arithmetic as the separable implementation, which works
/// on exact integer squared distances in voxel units.
inline Volume brute_force_edt(const VoxelMask& obstacles) {
    const double spacing = obstacles.iso_spacing();
    std::vector<std::array<int, 3>> obs;
    for (std::size_t i = 0; i < obstacles.size(); ++i)
        if (obstacles.data[i]) obs.push_back(obstacles.coords(i));

    Volume dist;
    static_cast<Grid&>(dist) = obstacles;
    dist.data.resize(obstacles.size());
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
        const auto c = obstacles.coords(i);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& o : obs) {
            const double dx = c[0] - o[0], dy = c[1] - o[1], dz = c[2] - o[2];
            best = std::min(best, dx * dx + dy * dy + dz * dz);
        }
        dist.data[i] = static_cast<float>(std::sqrt(best) * spacing);
    }
    return dist;
}

/// Bellman-Ford single-source distances over the region adjacency graph
/// under the total edge cost. Relaxation uses dist[u] + edge_cost, the same
/// left-to-right accumulation as the Dijkstra implementation, so distances
/// along a unique shortest path agree bitwise. Unreachable nodes stay +inf.
inline std::vector<double> bellman_ford(const RegionAdjacencyGraph& g, int src) {
    const std::size_t n = static_cast<std::size_t>(g.node_count) + 1;
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    dist[src] = 0.0;
    for (int round = 0; round < g.node_count - 1; ++round) {
        bool changed = false;
        for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
            const RagEdge& e = g.edges[ei];
            const double w = g.edge_cost(ei);
            if (dist[e.a] + w < dist[e.b]) {
                dist[e.b] = dist[e.a] + w;
                changed = true;
            }
            if (dist[e.b] + w < dist[e.a]) {
                dist[e.a] = dist[e.b] + w;
                changed = true;
            }
        }
        if (!changed) break;
    }
    return dist;
}

/// Linear-scan nearest point with the library's tie rule: strictly smaller
/// squared distance wins, so the first (smallest) index is kept on ties.
inline std::pair<std::size_t, double> brute_nearest(const std::vector<Vec3>& points,
                                                    const Vec3& q) {
    double best_d2 = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double d2 = (points[i] - q).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best_i = i;
        }
    }
    return {best_i, std::sqrt(best_d2)};
}

/// Double-loop directed mean distance with the same accumulation order as
/// the grid-accelerated version (sum over `from` in point order, then one
/// division), so results agree bitwise.
inline double brute_directed_mean(const Curve& from, const Curve& to) {
    double sum = 0.0;
    for (const Vec3& p : from.points) sum += brute_nearest(to.points, p).second;
    return sum / static_cast<double>(from.points.size());
}

/// Exhaustive optimum of the open tour start -> (middles in any order) ->
/// end over a terminal cost matrix, where index 0 is the start terminal and
/// index 1 the end terminal.
inline double exhaustive_open_cost(const Eigen::MatrixXd& cost) {
    const int t = static_cast<int>(cost.rows());
    std::vector<int> mid;
    for (int i = 2; i < t; ++i) mid.push_back(i);
    if (mid.empty()) return cost(0, 1);
    double best = std::numeric_limits<double>::infinity();
    do {
        double c = cost(0, mid.front());
        for (std::size_t k = 0; k + 1 < mid.size(); ++k) c += cost(mid[k], mid[k + 1]);
        c += cost(mid.back(), 1);
        best = std::min(best, c);
    } while (std::next_permutation(mid.begin(), mid.end()));
    return best;
}

/// Face-adjacent (6-connectivity) label pairs, a < b, by scanning every
/// +x/+y/+z neighbor. Label 0 is background and never participates.
inline std::set<std::pair<int, int>> brute_face_adjacency(const LabelVolume& labels) {
    std::set<std::pair<int, int>> pairs;
    for (int z = 0; z < labels.nz(); ++z)
        for (int y = 0; y < labels.ny(); ++y)
            for (int x = 0; x < labels.nx(); ++x) {
                const int a = labels.at(x, y, z);
                if (a == 0) continue;
                const auto consider = [&](int nx, int ny, int nz) {
                    if (!labels.in_bounds(nx, ny, nz)) return;
                    const int b = labels.at(nx, ny, nz);
                    if (b == 0 || b == a) return;
                    pairs.insert({std::min(a, b), std::max(a, b)});
                };
                consider(x + 1, y, z);
                consider(x, y + 1, z);
                consider(x, y, z + 1);
            }
    return pairs;
}

}  // namespace tubetrack::oracles
