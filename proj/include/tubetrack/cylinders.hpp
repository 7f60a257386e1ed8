#pragma once

#include <cstdint>
#include <vector>

#include "tubetrack/volume.hpp"

namespace tubetrack {

/// A finite cylinder in world (mm) coordinates. `axis` is unit length and its
/// largest-magnitude component is kept non-negative so fits are reproducible.
struct Cylinder {
    Vec3 center = Vec3::Zero();
    Vec3 axis = Vec3::UnitZ();
    double radius_mm = 0.0;
    double height_mm = 0.0;
    int inlier_count = 0;
    bool valid = false;

    /// True when p lies within the radial and axial extent of the cylinder.
    bool contains(const Vec3& p) const {
        const Vec3 d = p - center;
        const double t = d.dot(axis);
        if (std::abs(t) > 0.5 * height_mm) return false;
        const double radial = (d - t * axis).norm();
        return radial <= radius_mm;
    }
};

struct RansacParams {
    int iterations = 50000;
    double inlier_tol_mm = 1.0;
    double min_radius_mm = 7.04;
    double max_radius_mm = 15.28;
    int min_support = 30;
    std::uint64_t seed = 0;
};

/// RANSAC cylinder fit over a point cloud. Each iteration samples three
/// distinct points; the plane through them gives the axis candidate and their
/// circumcircle (in that plane) gives center and radius. Candidates with a
/// radius outside [min_radius, max_radius] are rejected; inliers are points
/// whose distance to the infinite cylinder surface is at most inlier_tol_mm.
/// The winning candidate is refined on its consensus set (projected circle
/// fit alternated with a shrinking axis-tilt search, then one inlier
/// reselection) and the center is pinned to the mean of the inlier
/// projections onto the axis line. valid == false when fewer than 3 points
/// are given or no candidate reaches min_support inliers.
Cylinder fit_cylinder_ransac(const std::vector<Vec3>& points, const RansacParams& params);

/// Fits one cylinder per peak from the binarized wall voxel centers inside an
/// axis-aligned cube patch (side patch_mm) centered on the peak. Every peak
/// yields an entry; failed fits carry valid == false. height_mm is attached
/// to each fit. Deterministic for a fixed seed regardless of thread count.
std::vector<Cylinder> fit_local_cylinders(const std::vector<Vec3>& peaks_mm,
                                          const VoxelMask& walls_bin, double patch_mm,
                                          double height_mm, const RansacParams& params,
                                          int threads = 0);

}  // namespace tubetrack
