#pragma once

#include <cstdint>
#include <vector>

#include "tubetrack/volume.hpp"

namespace tubetrack {

/// Partition of the in-mask voxels into supervoxels. Label 0 is background
/// (outside the mask); valid ids run 1..count. Per-id statistics are indexed
/// by id, so entry 0 of each vector is unused.
struct SupervoxelLabeling {
    LabelVolume labels;
    int count = 0;
    std::vector<Vec3> centroid_mm;      // arithmetic mean of member voxel centers
    std::vector<double> mean_feature;   // mean feature value of members
    std::vector<int> voxel_count;
};

/// Mask-restricted SLIC in joint (feature, position) space with adaptive
/// per-cluster feature normalization (SLIC-zero scheme, starting from the
/// given compactness). Seeds are placed on a regular grid of cell volume
/// target_sv_volume_mm3 clipped to the mask; empty cells are skipped. After
/// the fixed iteration count every supervoxel is made 26-connected by
/// relabeling orphan components to the nearest adjacent supervoxel.
///
/// The clustering is fully deterministic; seed is accepted for interface
/// stability and currently unused.
SupervoxelLabeling slic_supervoxels(const Volume& feature, const VoxelMask& mask,
                                    double target_sv_volume_mm3, double compactness,
                                    std::uint64_t seed = 0, int iterations = 10);

}  // namespace tubetrack
