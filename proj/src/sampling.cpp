#include "tubetrack/sampling.hpp"

#include <algorithm>
#include <cstdio>
#include <queue>
#include <unordered_set>

namespace tubetrack {

namespace {

// Flood-fills the equal-valued plateau containing `start`, collecting every
// member voxel and whether any 26-neighbor exceeds the value.  Elongated
// ridge plateaus (common when a tubular mask runs parallel to a grid axis)
// must yield several spaced peaks rather than a single representative, so the
// caller emits every member and lets distance-based suppression thin them.
struct PlateauResult {
    std::vector<std::size_t> members;
    bool is_max = true;
};

PlateauResult explore_plateau(const Volume& v, std::size_t start, std::vector<uint8_t>& visited) {
    const float value = v.data[start];
    PlateauResult res;

    std::queue<std::size_t> frontier;
    frontier.push(start);
    visited[start] = 1;
    while (!frontier.empty()) {
        const std::size_t cur = frontier.front();
        frontier.pop();
        res.members.push_back(cur);
        const auto [x, y, z] = v.coords(cur);
        for (int dz = -1; dz <= 1; ++dz) {
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0 && dz == 0) continue;
                    const int qx = x + dx, qy = y + dy, qz = z + dz;
                    if (!v.in_bounds(qx, qy, qz)) continue;
                    const std::size_t qi = v.index(qx, qy, qz);
                    const float qv = v.data[qi];
                    if (qv > value) res.is_max = false;
                    if (qv == value && !visited[qi]) {
                        visited[qi] = 1;
                        frontier.push(qi);
                    }
                }
            }
        }
    }
    return res;
}

}  // namespace

std::vector<Peak> find_local_maxima(const Volume& distance, double min_value) {
    std::vector<uint8_t> visited(distance.size(), 0);
    std::vector<Peak> peaks;
    for (std::size_t i = 0; i < distance.size(); ++i) {
        if (visited[i]) continue;
        const float value = distance.data[i];
        if (value < min_value) continue;
        PlateauResult plateau = explore_plateau(distance, i, visited);
        if (!plateau.is_max) continue;
        std::sort(plateau.members.begin(), plateau.members.end());
        for (const std::size_t voxel : plateau.members) {
            Peak p;
            p.voxel = voxel;
            const auto [x, y, z] = distance.coords(voxel);
            p.position_mm = distance.voxel_center_mm(x, y, z);
            p.value = value;
            peaks.push_back(p);
        }
    }
    std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.voxel < b.voxel;
    });
    return peaks;
}

std::vector<Peak> suppress_peaks(const std::vector<Peak>& peaks, double min_separation_mm) {
    std::vector<Peak> kept;
    const double sep2 = min_separation_mm * min_separation_mm;
    for (const Peak& p : peaks) {
        bool ok = true;
        for (const Peak& k : kept) {
            if ((p.position_mm - k.position_mm).squaredNorm() < sep2) {
                ok = false;
                break;
            }
        }
        if (ok) kept.push_back(p);
    }
    return kept;
}

MustPassNodeSet sample_must_pass(const Volume& distance, const SupervoxelLabeling& labeling,
                                 double theta_v_mm, double theta_d_mm, double warn_fraction) {
    if (!distance.same_grid(labeling.labels))
        throw TrackError("sampling", "distance map grid does not match the supervoxel grid");

    MustPassNodeSet out;
    out.theta_v_mm = theta_v_mm;
    out.theta_d_mm = theta_d_mm;

    const std::vector<Peak> raw = find_local_maxima(distance, theta_v_mm);
    std::vector<Peak> accepted = suppress_peaks(raw, theta_d_mm);

    std::unordered_set<int> seen;
    for (Peak& p : accepted) {
        p.node = labeling.labels.data[p.voxel];
        if (p.node <= 0) continue;
        if (seen.insert(p.node).second) out.node_ids.push_back(p.node);
    }
    out.peaks = std::move(accepted);

    if (labeling.count > 0 &&
        static_cast<double>(out.node_ids.size()) > warn_fraction * labeling.count) {
        std::fprintf(stderr,
                     "[sampling] warning: %zu must-pass nodes out of %d supervoxels "
                     "(expected a sparse set)\n",
                     out.node_ids.size(), labeling.count);
    }
    return out;
}

}  // namespace tubetrack
