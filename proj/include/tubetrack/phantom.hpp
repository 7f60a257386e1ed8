#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tubetrack/curve.hpp"
#include "tubetrack/volume.hpp"

namespace tubetrack {

enum class PhantomKind { straight, helix, random_spline };

PhantomKind phantom_kind_from_string(const std::string& s);
std::string to_string(PhantomKind k);

/// Synthetic convoluted-tube phantom description. The tube is rendered along
/// a centerline: radial distance < r−w is lumen, [r−w, r] is wall, anything
/// farther is background; the segmentation mask is radial distance ≤ r.
///
/// `random_spline` lays the tube out as two stacked serpentine layers whose
/// runs cross at a sub-voxel surface gap, guaranteeing self-contact regions;
/// layout jitter is driven by the seed. `contact_wall_fade` > 0 additionally
/// fades the wall intensity toward the lumen intensity near contact centers,
/// imitating the indistinct shared walls that make contacts hard to track.
struct PhantomSpec {
    std::array<int, 3> dims{112, 112, 48};
    double spacing_mm = 2.0;
    PhantomKind kind = PhantomKind::straight;
    std::vector<Vec3> control_points;  // when non-empty, overrides the generator kind

    double tube_radius_mm = 9.0;
    double wall_thickness_mm = 2.5;
    double lumen_intensity = 200.0;
    double wall_intensity = 50.0;
    double background_intensity = 100.0;
    double noise_sigma = 5.0;
    std::uint64_t seed = 0;

    double straight_length_mm = 0.0;  // 0 → fill the x extent minus margins

    double helix_radius_mm = 40.0;
    double helix_pitch_mm = 60.0;
    double helix_turns = 2.0;

    int target_contacts = 1;   // random_spline: minimum self-contact regions
    int max_retries = 10;      // re-jitter attempts before giving up
    double contact_wall_fade = 0.0;       // 0 = crisp walls, 1 = walls vanish at contacts
    double contact_fade_radius_mm = 12.0;

    // Periodic caliber variation: the tube radius swells by up to
    // radius_bump_mm with the given arc-length period.  0 disables it.
    double radius_bump_mm = 0.0;
    double radius_bump_period_mm = 20.0;

    // Smooth pseudo-random intensity variation inside the lumen, imitating
    // heterogeneous tube content. Amplitude in intensity units (0 disables),
    // correlation length in mm.
    double lumen_texture_amplitude = 0.0;
    double lumen_texture_scale_mm = 8.0;
};

struct PhantomResult {
    Volume volume;
    VoxelMask segmentation;
    Curve gt_path;
    Vec3 start_mm = Vec3::Zero();
    Vec3 end_mm = Vec3::Zero();
    std::vector<Vec3> contact_centers_mm;
};

/// Validates the spec (radius/wall ordering, boundary clearance, minimum bend
/// radius ≥ 2·tube_radius) before rendering and raises TrackError on
/// violations. Deterministic for a fixed spec.
PhantomResult generate_phantom(const PhantomSpec& spec, int threads = 0);

/// Self-contact regions of a centerline: pairs of curve samples farther than
/// arc_window_mm apart along the curve but with Euclidean distance at most
/// max_dist_mm, clustered into region centers.
std::vector<Vec3> find_self_contacts(const Curve& dense, double arc_window_mm,
                                     double max_dist_mm, double cluster_radius_mm);

}  // namespace tubetrack
