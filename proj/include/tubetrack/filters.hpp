#pragma once

#include <vector>

#include "tubetrack/volume.hpp"

namespace tubetrack {

/// Multi-scale valley (wall) detector built on the modified Hessian
/// eigenvalues of the Meijering neuriteness construction. At each scale the
/// Hessian is computed with sampled Gaussian-derivative kernels and scale-
/// normalized by sigma^2; per voxel the modified eigenvalues are
/// lam_i' = lam_i + (lam_1 + lam_2 + lam_3) / 3 and the valley response is
/// the positive part of the largest one. Responses are maximized over scales
/// and min-max normalized to [0, 1].
///
/// dark_sheets = true targets dark structures between bright surroundings
/// (walls between contrast-filled lumen); false negates the input first.
Volume meijering_valley(const Volume& v, const std::vector<double>& scales_mm,
                        bool dark_sheets = true, int threads = 0);

/// mask = (response >= threshold); threshold must be in (0, 1).
VoxelMask binarize_walls(const Volume& wall_map, double threshold);

/// Exact Euclidean distance transform (separable lower-envelope algorithm),
/// in millimeters. Obstacle voxels get distance 0. Throws if the obstacle
/// set is empty; an all-obstacle mask yields an all-zero map.
Volume euclidean_distance_transform(const VoxelMask& obstacles, int threads = 0);

/// obstacles = NOT(segmentation) OR walls; the input to the distance map
/// used for must-pass node sampling.
VoxelMask invert_or(const VoxelMask& segmentation, const VoxelMask& walls);

}  // namespace tubetrack
