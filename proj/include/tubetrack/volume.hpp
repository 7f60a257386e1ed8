#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace tubetrack {

using Vec3 = Eigen::Vector3d;

/// Error type for I/O failures and violated preconditions. Carries an
/// optional pipeline stage name so the CLI can report where things broke.
class TrackError : public std::runtime_error {
public:
    explicit TrackError(const std::string& msg) : std::runtime_error(msg) {}
    TrackError(const std::string& stage, const std::string& msg)
        : std::runtime_error("[" + stage + "] " + msg) {}
};

/// Grid metadata shared by all volume-like containers. Voxel (0,0,0) has its
/// center at `origin` (mm); voxel (x,y,z) is at origin + (x,y,z) * spacing.
/// Data layout is x-fastest: index = x + nx * (y + ny * z).
struct Grid {
    std::array<int, 3> dims{0, 0, 0};
    Vec3 spacing{1.0, 1.0, 1.0};  // mm per voxel, per axis
    Vec3 origin{0.0, 0.0, 0.0};   // mm position of voxel (0,0,0)

    int nx() const { return dims[0]; }
    int ny() const { return dims[1]; }
    int nz() const { return dims[2]; }
    std::size_t size() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }
    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims[0]) *
                   (static_cast<std::size_t>(y) +
                    static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(z));
    }
    std::array<int, 3> coords(std::size_t linear) const {
        const int x = static_cast<int>(linear % dims[0]);
        const int y = static_cast<int>((linear / dims[0]) % dims[1]);
        const int z = static_cast<int>(linear / (static_cast<std::size_t>(dims[0]) * dims[1]));
        return {x, y, z};
    }
    bool in_bounds(int x, int y, int z) const {
        return x >= 0 && y >= 0 && z >= 0 && x < dims[0] && y < dims[1] && z < dims[2];
    }
    bool is_isotropic(double eps = 1e-9) const {
        return std::abs(spacing[0] - spacing[1]) <= eps &&
               std::abs(spacing[1] - spacing[2]) <= eps;
    }
    /// Scalar spacing for isotropic grids; throws if the grid is anisotropic.
    double iso_spacing() const;

    Vec3 voxel_center_mm(int x, int y, int z) const {
        return origin + Vec3(x * spacing[0], y * spacing[1], z * spacing[2]);
    }
    Vec3 voxel_center_mm(std::size_t linear) const {
        const auto c = coords(linear);
        return voxel_center_mm(c[0], c[1], c[2]);
    }
    /// Voxel whose center is nearest to a physical position (not clamped).
    std::array<int, 3> nearest_voxel(const Vec3& mm) const {
        return {static_cast<int>(std::lround((mm[0] - origin[0]) / spacing[0])),
                static_cast<int>(std::lround((mm[1] - origin[1]) / spacing[1])),
                static_cast<int>(std::lround((mm[2] - origin[2]) / spacing[2]))};
    }
    bool same_grid(const Grid& other, double eps = 1e-6) const {
        return dims == other.dims && (spacing - other.spacing).norm() <= eps &&
               (origin - other.origin).norm() <= eps;
    }
};

/// 3D scalar volume. Carries CT intensities, filter responses, or distances.
struct Volume : Grid {
    std::vector<float> data;

    Volume() = default;
    Volume(std::array<int, 3> d, double iso_spacing_mm, Vec3 origin_mm = Vec3::Zero(),
           float fill = 0.0f) {
        dims = d;
        spacing = Vec3::Constant(iso_spacing_mm);
        origin = origin_mm;
        data.assign(size(), fill);
    }

    float& at(int x, int y, int z) { return data[index(x, y, z)]; }
    float at(int x, int y, int z) const { return data[index(x, y, z)]; }

    float min_value() const;
    float max_value() const;
};

/// Binary mask on the same grid as its source volume.
struct VoxelMask : Grid {
    std::vector<std::uint8_t> data;

    VoxelMask() = default;
    explicit VoxelMask(const Grid& g, std::uint8_t fill = 0) {
        static_cast<Grid&>(*this) = g;
        data.assign(size(), fill);
    }

    std::uint8_t& at(int x, int y, int z) { return data[index(x, y, z)]; }
    std::uint8_t at(int x, int y, int z) const { return data[index(x, y, z)]; }
    std::size_t count() const;
};

/// Integer label volume (supervoxel ids, 0 = background).
struct LabelVolume : Grid {
    std::vector<std::int32_t> data;

    LabelVolume() = default;
    explicit LabelVolume(const Grid& g, std::int32_t fill = 0) {
        static_cast<Grid&>(*this) = g;
        data.assign(size(), fill);
    }

    std::int32_t& at(int x, int y, int z) { return data[index(x, y, z)]; }
    std::int32_t at(int x, int y, int z) const { return data[index(x, y, z)]; }
};

// ---------------------------------------------------------------------------
// I/O. Format is chosen by extension: .nii / .nii.gz for NIfTI-1, .raw for
// little-endian float32 with a JSON sidecar ("foo.raw" + "foo.json").
// ---------------------------------------------------------------------------

Volume load_volume(const std::string& path);
void save_volume(const Volume& v, const std::string& path);

/// Mask loader: reads any supported volume and thresholds at 0.5.
VoxelMask load_mask(const std::string& path);
void save_mask(const VoxelMask& m, const std::string& path);

/// Labels are written as int32 NIfTI; .raw falls back to float32.
void save_labels(const LabelVolume& l, const std::string& path);

// ---------------------------------------------------------------------------
// Resampling and cropping
// ---------------------------------------------------------------------------

/// Trilinear resample onto an isotropic grid of the given spacing. Output
/// dims are round(extent / target); sample positions outside the input grid
/// clamp to the nearest edge voxel.
Volume resample_isotropic(const Volume& v, double target_mm);

/// Mask resampling: trilinear on the 0/1 values, then threshold at 0.5.
VoxelMask resample_mask_isotropic(const VoxelMask& m, double target_mm);

/// Keep slices whose center z lies in [zmin_mm, zmax_mm]; origin is adjusted.
Volume crop_z(const Volume& v, double zmin_mm, double zmax_mm);

}  // namespace tubetrack
