#include "tubetrack/rag.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>

namespace tubetrack {

RegionAdjacencyGraph build_rag(const SupervoxelLabeling& labeling) {
    const LabelVolume& lv = labeling.labels;
    const int nx = lv.nx(), ny = lv.ny(), nz = lv.nz();

    RegionAdjacencyGraph g;
    g.node_count = labeling.count;
    g.centroid_mm = labeling.centroid_mm;

    // Collect both-side boundary voxels per unordered adjacent pair.
    std::map<std::pair<int, int>, std::vector<std::size_t>> boundary;
    auto visit = [&](int la, std::size_t ia, int lb, std::size_t ib) {
        if (la <= 0 || lb <= 0 || la == lb) return;
        auto key = std::minmax(la, lb);
        auto& vox = boundary[{key.first, key.second}];
        vox.push_back(ia);
        vox.push_back(ib);
    };
    for (int z = 0; z < nz; ++z) {
        for (int y = 0; y < ny; ++y) {
            for (int x = 0; x < nx; ++x) {
                const std::size_t i = lv.index(x, y, z);
                const int l = lv.data[i];
                if (x + 1 < nx) visit(l, i, lv.data[i + 1], i + 1);
                if (y + 1 < ny) visit(l, i, lv.data[lv.index(x, y + 1, z)], lv.index(x, y + 1, z));
                if (z + 1 < nz) visit(l, i, lv.data[lv.index(x, y, z + 1)], lv.index(x, y, z + 1));
            }
        }
    }

    g.edges.reserve(boundary.size());
    for (auto& [key, vox] : boundary) {
        std::sort(vox.begin(), vox.end());
        vox.erase(std::unique(vox.begin(), vox.end()), vox.end());
        RagEdge e;
        e.a = key.first;
        e.b = key.second;
        e.boundary_voxels = std::move(vox);
        g.edges.push_back(std::move(e));
    }

    g.adjacency.assign(static_cast<std::size_t>(g.node_count) + 1, {});
    for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
        const RagEdge& e = g.edges[ei];
        g.adjacency[e.a].push_back({e.b, static_cast<int>(ei)});
        g.adjacency[e.b].push_back({e.a, static_cast<int>(ei)});
    }
    return g;
}

void compute_wall_costs(RegionAdjacencyGraph& g, const SupervoxelLabeling& labeling,
                        const Volume& walls) {
    if (!labeling.labels.same_grid(walls))
        throw TrackError("graph", "wall response grid does not match the supervoxel grid");
    for (RagEdge& e : g.edges) {
        if (e.boundary_voxels.empty()) {
            e.cost_wall = 0.0;
            continue;
        }
        double sum = 0.0;
        for (std::size_t i : e.boundary_voxels) sum += walls.data[i];
        e.cost_wall = sum / static_cast<double>(e.boundary_voxels.size());
    }
}

void compute_cylinder_costs(RegionAdjacencyGraph& g, const std::vector<Cylinder>& cylinders) {
    for (RagEdge& e : g.edges) {
        e.cost_cyl = 0.5;
        const Vec3& pa = g.centroid_mm[e.a];
        const Vec3& pb = g.centroid_mm[e.b];
        const Vec3 mid = 0.5 * (pa + pb);
        const Vec3 dir = pb - pa;
        const double len = dir.norm();

        int best = -1;
        double best_dist = 0.0;
        for (std::size_t ci = 0; ci < cylinders.size(); ++ci) {
            const Cylinder& c = cylinders[ci];
            if (!c.valid) continue;
            if (!c.contains(pa) || !c.contains(pb)) continue;
            const double d = (c.center - mid).norm();
            if (best < 0 || d < best_dist) {
                best = static_cast<int>(ci);
                best_dist = d;
            }
        }
        if (best < 0 || len <= 0.0) continue;  // degenerate edges keep the default
        const double cosang = std::abs(dir.dot(cylinders[best].axis)) / len;
        e.cost_cyl = 1.0 - std::min(1.0, cosang);
    }
}

void write_edge_list(const RegionAdjacencyGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw TrackError("graph", "cannot open edge list for writing: " + path);
    char line[160];
    for (const RagEdge& e : g.edges) {
        std::snprintf(line, sizeof(line), "%d %d %.9g %.9g %.9g\n", e.a, e.b, e.cost_wall,
                      e.cost_cyl, e.cost_wall + g.lambda * e.cost_cyl);
        out << line;
    }
    if (!out) throw TrackError("graph", "failed writing edge list: " + path);
}

}  // namespace tubetrack
