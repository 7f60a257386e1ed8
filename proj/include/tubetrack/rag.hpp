#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "tubetrack/cylinders.hpp"
#include "tubetrack/supervoxel.hpp"
#include "tubetrack/volume.hpp"

namespace tubetrack {

struct RagEdge {
    int a = 0, b = 0;  // node ids with a < b
    std::vector<std::size_t> boundary_voxels;  // deduplicated linear indices, both sides
    double cost_wall = 0.0;
    double cost_cyl = 0.5;
};

/// Region adjacency graph over supervoxels. Nodes are ids 1..node_count;
/// edges connect face-adjacent (6-connectivity) supervoxel pairs. The total
/// edge cost is cost_wall + lambda * cost_cyl.
struct RegionAdjacencyGraph {
    int node_count = 0;
    std::vector<Vec3> centroid_mm;  // indexed by node id, entry 0 unused
    std::vector<RagEdge> edges;
    double lambda = 1.0;

    /// adjacency[node] = (neighbor node, edge index); built with the edges.
    std::vector<std::vector<std::pair<int, int>>> adjacency;

    double edge_cost(std::size_t edge_index) const {
        const RagEdge& e = edges[edge_index];
        return e.cost_wall + lambda * e.cost_cyl;
    }
    bool has_node(int id) const { return id >= 1 && id <= node_count; }
};

RegionAdjacencyGraph build_rag(const SupervoxelLabeling& labeling);

/// cost_wall(i,j) = mean wall response over the edge's boundary voxel set.
void compute_wall_costs(RegionAdjacencyGraph& g, const SupervoxelLabeling& labeling,
                        const Volume& walls);

/// Angular cylindrical cost: for edges whose endpoint centroids both lie
/// inside a finite cylinder, cost_cyl = 1 - |cos(angle(edge, axis))|; if
/// several cylinders contain the edge, the one with center nearest the edge
/// midpoint is used. Edges outside every cylinder keep the 0.5 default.
void compute_cylinder_costs(RegionAdjacencyGraph& g, const std::vector<Cylinder>& cylinders);

/// Edge list dump: "a b cost_wall cost_cyl cost_total" per line.
void write_edge_list(const RegionAdjacencyGraph& g, const std::string& path);

}  // namespace tubetrack
