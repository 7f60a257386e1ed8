#include "tubetrack/supervoxel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace tubetrack {

namespace {

struct Cluster {
    Vec3 center_vox;      // continuous voxel coordinates
    double feature = 0;
    double max_feat_sq;   // adaptive normalizer (max observed squared feature distance)
};

// Relabel orphan 26-connected components so each final supervoxel is
// connected. Components other than the largest one of each label are merged
// into the adjacent label with the nearest cluster center; isolated orphans
// (touching only background) become fresh labels.
void enforce_connectivity(LabelVolume& labels, std::vector<Cluster>& clusters) {
    const std::size_t n = labels.size();

    std::vector<int> comp(n, -1);
    std::vector<std::vector<std::size_t>> comp_voxels;
    std::vector<int> comp_label;

    // 26-neighborhood offsets
    std::vector<std::array<int, 3>> nbr;
    for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx)
                if (dx || dy || dz) nbr.push_back({dx, dy, dz});

    for (std::size_t i = 0; i < n; ++i) {
        if (labels.data[i] == 0 || comp[i] >= 0) continue;
        const int c = static_cast<int>(comp_voxels.size());
        comp_voxels.emplace_back();
        comp_label.push_back(labels.data[i]);
        std::deque<std::size_t> queue{i};
        comp[i] = c;
        while (!queue.empty()) {
            const std::size_t cur = queue.front();
            queue.pop_front();
            comp_voxels[c].push_back(cur);
            const auto [x, y, z] = labels.coords(cur);
            for (const auto& d : nbr) {
                const int px = x + d[0], py = y + d[1], pz = z + d[2];
                if (!labels.in_bounds(px, py, pz)) continue;
                const std::size_t j = labels.index(px, py, pz);
                if (labels.data[j] == labels.data[i] && comp[j] < 0) {
                    comp[j] = c;
                    queue.push_back(j);
                }
            }
        }
    }

    // keep the largest component per label (ties: first in scan order)
    const int n_labels = static_cast<int>(clusters.size());
    std::vector<int> kept_comp(n_labels + 1, -1);
    for (int c = 0; c < static_cast<int>(comp_voxels.size()); ++c) {
        const int lbl = comp_label[c];
        if (kept_comp[lbl] < 0 || comp_voxels[c].size() > comp_voxels[kept_comp[lbl]].size())
            kept_comp[lbl] = c;
    }

    std::vector<char> settled(comp_voxels.size(), 0);
    std::vector<int> orphans;
    for (int c = 0; c < static_cast<int>(comp_voxels.size()); ++c) {
        if (kept_comp[comp_label[c]] == c)
            settled[c] = 1;
        else
            orphans.push_back(c);
    }

    // Merge orphans that touch a settled region; repeat until no progress.
    // Remaining isolated orphans get new label ids.
    bool progress = true;
    while (progress && !orphans.empty()) {
        progress = false;
        std::vector<int> still;
        for (int c : orphans) {
            // candidate labels adjacent through settled voxels
            std::vector<int> cand;
            for (std::size_t vi : comp_voxels[c]) {
                const auto [x, y, z] = labels.coords(vi);
                for (const auto& d : nbr) {
                    const int px = x + d[0], py = y + d[1], pz = z + d[2];
                    if (!labels.in_bounds(px, py, pz)) continue;
                    const std::size_t j = labels.index(px, py, pz);
                    if (labels.data[j] != 0 && labels.data[j] != comp_label[c] &&
                        settled[comp[j]])
                        cand.push_back(labels.data[j]);
                }
            }
            if (cand.empty()) {
                still.push_back(c);
                continue;
            }
            std::sort(cand.begin(), cand.end());
            cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

            Vec3 centroid = Vec3::Zero();
            for (std::size_t vi : comp_voxels[c]) {
                const auto [x, y, z] = labels.coords(vi);
                centroid += Vec3(x, y, z);
            }
            centroid /= static_cast<double>(comp_voxels[c].size());

            int best = cand.front();
            double best_d = std::numeric_limits<double>::max();
            for (int lbl : cand) {
                const double d = (clusters[lbl - 1].center_vox - centroid).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = lbl;
                }
            }
            for (std::size_t vi : comp_voxels[c]) labels.data[vi] = best;
            comp_label[c] = best;
            settled[c] = 1;
            progress = true;
        }
        orphans.swap(still);
    }
    for (int c : orphans) {
        Cluster fresh;
        fresh.center_vox = Vec3::Zero();
        for (std::size_t vi : comp_voxels[c]) {
            const auto [x, y, z] = labels.coords(vi);
            fresh.center_vox += Vec3(x, y, z);
        }
        fresh.center_vox /= static_cast<double>(comp_voxels[c].size());
        fresh.max_feat_sq = 0;
        clusters.push_back(fresh);
        const int new_label = static_cast<int>(clusters.size());
        for (std::size_t vi : comp_voxels[c]) labels.data[vi] = new_label;
    }
}

}  // namespace

SupervoxelLabeling slic_supervoxels(const Volume& feature, const VoxelMask& mask,
                                    double target_sv_volume_mm3, double compactness,
                                    std::uint64_t /*seed*/, int iterations) {
    if (!feature.same_grid(mask)) throw TrackError("slic_supervoxels: feature/mask grids differ");
    if (target_sv_volume_mm3 <= 0.0)
        throw TrackError("slic_supervoxels: target supervoxel volume must be > 0");
    const double spacing = feature.iso_spacing();
    const std::size_t mask_count = mask.count();
    if (mask_count == 0) throw TrackError("slic_supervoxels: empty mask");

    const int nx = feature.dims[0], ny = feature.dims[1], nz = feature.dims[2];
    const double cell_mm = std::cbrt(target_sv_volume_mm3);
    const double cell_vox = std::max(1.0, cell_mm / spacing);

    // --- seeding: one seed per grid cell that contains mask voxels, placed
    // at the mask voxel nearest the cell center
    std::vector<Cluster> clusters;
    const int cx = std::max(1, static_cast<int>(std::ceil(nx / cell_vox)));
    const int cy = std::max(1, static_cast<int>(std::ceil(ny / cell_vox)));
    const int cz = std::max(1, static_cast<int>(std::ceil(nz / cell_vox)));
    for (int kz = 0; kz < cz; ++kz) {
        for (int ky = 0; ky < cy; ++ky) {
            for (int kx = 0; kx < cx; ++kx) {
                const Vec3 cell_center((kx + 0.5) * cell_vox, (ky + 0.5) * cell_vox,
                                       (kz + 0.5) * cell_vox);
                const int x0 = static_cast<int>(kx * cell_vox);
                const int y0 = static_cast<int>(ky * cell_vox);
                const int z0 = static_cast<int>(kz * cell_vox);
                const int x1 = std::min(nx, static_cast<int>((kx + 1) * cell_vox) + 1);
                const int y1 = std::min(ny, static_cast<int>((ky + 1) * cell_vox) + 1);
                const int z1 = std::min(nz, static_cast<int>((kz + 1) * cell_vox) + 1);
                double best_d = std::numeric_limits<double>::max();
                int bx = -1, by = -1, bz = -1;
                for (int z = z0; z < z1; ++z)
                    for (int y = y0; y < y1; ++y)
                        for (int x = x0; x < x1; ++x) {
                            if (!mask.at(x, y, z)) continue;
                            const double d = (Vec3(x, y, z) - cell_center).squaredNorm();
                            if (d < best_d) {
                                best_d = d;
                                bx = x;
                                by = y;
                                bz = z;
                            }
                        }
                if (bx >= 0) {
                    Cluster c;
                    c.center_vox = Vec3(bx, by, bz);
                    c.feature = feature.at(bx, by, bz);
                    c.max_feat_sq = compactness * compactness;
                    clusters.push_back(c);
                }
            }
        }
    }
    if (clusters.empty()) throw TrackError("slic_supervoxels: seeding produced no clusters");

    LabelVolume labels(feature, 0);
    std::vector<float> best_dist(feature.size());
    std::vector<float> feat_dist_sq(feature.size(), 0.0f);
    const double inv_s2 = 1.0 / (cell_vox * cell_vox);

    for (int iter = 0; iter < iterations; ++iter) {
        std::fill(best_dist.begin(), best_dist.end(), std::numeric_limits<float>::max());
        std::fill(labels.data.begin(), labels.data.end(), 0);

        // assignment: each cluster scans a window of one cell half-width
        // around its center; lower cluster id wins exact ties
        for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
            const Cluster& c = clusters[ci];
            const int w = static_cast<int>(std::ceil(cell_vox)) + 1;
            const int x0 = std::max(0, static_cast<int>(c.center_vox[0]) - w);
            const int x1 = std::min(nx - 1, static_cast<int>(c.center_vox[0]) + w);
            const int y0 = std::max(0, static_cast<int>(c.center_vox[1]) - w);
            const int y1 = std::min(ny - 1, static_cast<int>(c.center_vox[1]) + w);
            const int z0 = std::max(0, static_cast<int>(c.center_vox[2]) - w);
            const int z1 = std::min(nz - 1, static_cast<int>(c.center_vox[2]) + w);
            for (int z = z0; z <= z1; ++z)
                for (int y = y0; y <= y1; ++y)
                    for (int x = x0; x <= x1; ++x) {
                        const std::size_t i = feature.index(x, y, z);
                        if (!mask.data[i]) continue;
                        const double df = feature.data[i] - c.feature;
                        const double df2 = df * df;
                        const double ds2 = (Vec3(x, y, z) - c.center_vox).squaredNorm();
                        const float d = static_cast<float>(df2 / c.max_feat_sq + ds2 * inv_s2);
                        if (d < best_dist[i]) {
                            best_dist[i] = d;
                            labels.data[i] = static_cast<int>(ci) + 1;
                            feat_dist_sq[i] = static_cast<float>(df2);
                        }
                    }
        }

        // fallback for mask voxels outside every window (possible after
        // centers drift): nearest center spatially
        for (std::size_t i = 0; i < feature.size(); ++i) {
            if (!mask.data[i] || labels.data[i] != 0) continue;
            const auto [x, y, z] = feature.coords(i);
            double bd = std::numeric_limits<double>::max();
            int bc = 1;
            for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
                const double d = (Vec3(x, y, z) - clusters[ci].center_vox).squaredNorm();
                if (d < bd) {
                    bd = d;
                    bc = static_cast<int>(ci) + 1;
                }
            }
            labels.data[i] = bc;
            const double df = feature.data[i] - clusters[bc - 1].feature;
            feat_dist_sq[i] = static_cast<float>(df * df);
        }

        // update: means in (feature, position); adaptive normalizer becomes
        // the max squared feature distance observed this round
        std::vector<Vec3> pos_sum(clusters.size(), Vec3::Zero());
        std::vector<double> feat_sum(clusters.size(), 0.0);
        std::vector<int> counts(clusters.size(), 0);
        std::vector<double> max_fs(clusters.size(), 0.0);
        for (std::size_t i = 0; i < feature.size(); ++i) {
            const int lbl = labels.data[i];
            if (lbl == 0) continue;
            const auto [x, y, z] = feature.coords(i);
            pos_sum[lbl - 1] += Vec3(x, y, z);
            feat_sum[lbl - 1] += feature.data[i];
            counts[lbl - 1] += 1;
            max_fs[lbl - 1] = std::max(max_fs[lbl - 1], static_cast<double>(feat_dist_sq[i]));
        }
        for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
            if (counts[ci] == 0) continue;  // keep stale center
            clusters[ci].center_vox = pos_sum[ci] / counts[ci];
            clusters[ci].feature = feat_sum[ci] / counts[ci];
            clusters[ci].max_feat_sq = std::max(max_fs[ci], 1e-12);
        }
    }

    // drop empty clusters, keep label order stable
    {
        std::vector<int> remap(clusters.size() + 1, 0);
        std::vector<Cluster> used;
        std::vector<char> nonempty(clusters.size(), 0);
        for (std::size_t i = 0; i < labels.data.size(); ++i)
            if (labels.data[i] > 0) nonempty[labels.data[i] - 1] = 1;
        for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
            if (nonempty[ci]) {
                used.push_back(clusters[ci]);
                remap[ci + 1] = static_cast<int>(used.size());
            }
        }
        for (auto& l : labels.data) l = remap[l];
        clusters.swap(used);
    }

    enforce_connectivity(labels, clusters);

    // final statistics
    SupervoxelLabeling out;
    out.labels = std::move(labels);
    out.count = static_cast<int>(clusters.size());
    out.centroid_mm.assign(out.count + 1, Vec3::Zero());
    out.mean_feature.assign(out.count + 1, 0.0);
    out.voxel_count.assign(out.count + 1, 0);
    for (std::size_t i = 0; i < out.labels.data.size(); ++i) {
        const int lbl = out.labels.data[i];
        if (lbl == 0) continue;
        out.centroid_mm[lbl] += out.labels.voxel_center_mm(i);
        out.mean_feature[lbl] += feature.data[i];
        out.voxel_count[lbl] += 1;
    }
    for (int lbl = 1; lbl <= out.count; ++lbl) {
        if (out.voxel_count[lbl] > 0) {
            out.centroid_mm[lbl] /= out.voxel_count[lbl];
            out.mean_feature[lbl] /= out.voxel_count[lbl];
        }
    }
    return out;
}

}  // namespace tubetrack
