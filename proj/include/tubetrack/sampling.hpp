#pragma once

#include <cstddef>
#include <vector>

#include "tubetrack/supervoxel.hpp"
#include "tubetrack/volume.hpp"

namespace tubetrack {

struct Peak {
    std::size_t voxel = 0;  // linear index into the distance grid
    Vec3 position_mm = Vec3::Zero();
    double value = 0.0;     // distance value at the peak
    int node = 0;           // supervoxel id containing the peak (0 = unlabeled)
};

/// Must-pass node set: supervoxels containing accepted distance-map peaks.
struct MustPassNodeSet {
    std::vector<int> node_ids;  // deduplicated, order of first appearance
    std::vector<Peak> peaks;    // accepted peaks, descending value order
    double theta_v_mm = 0.0;
    double theta_d_mm = 0.0;
};

/// 26-neighborhood local maxima of `distance` with value >= min_value.
/// A plateau (connected voxels of equal value) is a maximum when no
/// 26-neighbor of the plateau exceeds its value; every plateau member is
/// emitted so that elongated flat ridges — typical for tubular masks running
/// parallel to a grid axis — contribute peaks along their whole extent
/// rather than a single representative. Distance-based suppression is what
/// thins them afterwards. Results are sorted by descending value, ties by
/// ascending linear index.
std::vector<Peak> find_local_maxima(const Volume& distance, double min_value);

/// Greedy non-maximum suppression: walk peaks in descending value order and
/// keep a peak only when it is at least min_separation_mm from every peak
/// kept so far.
std::vector<Peak> suppress_peaks(const std::vector<Peak>& peaks, double min_separation_mm);

/// Full sampler: local maxima >= theta_v, suppressed at theta_d, mapped to
/// the supervoxels containing them (peaks on unlabeled voxels are skipped),
/// ids deduplicated in order of first appearance. Empty result is legal and
/// left to the caller to warn about; a stderr warning is emitted when the
/// set exceeds warn_fraction of the node count, since it is meant to be
/// sparse.
MustPassNodeSet sample_must_pass(const Volume& distance, const SupervoxelLabeling& labeling,
                                 double theta_v_mm, double theta_d_mm,
                                 double warn_fraction = 0.2);

}  // namespace tubetrack
