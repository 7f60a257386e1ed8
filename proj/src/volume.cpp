#include "tubetrack/volume.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "tubetrack/nifti.hpp"

namespace tubetrack {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string sidecar_path(const std::string& raw_path) {
    const auto dot = raw_path.find_last_of('.');
    return raw_path.substr(0, dot) + ".json";
}

Volume load_raw(const std::string& path) {
    std::ifstream side(sidecar_path(path));
    if (!side) throw TrackError("missing raw sidecar: " + sidecar_path(path));
    nlohmann::json j;
    try {
        side >> j;
    } catch (const nlohmann::json::exception& e) {
        throw TrackError("bad raw sidecar " + sidecar_path(path) + ": " + e.what());
    }

    Volume v;
    const auto dims = j.at("dims");
    if (!dims.is_array() || dims.size() != 3) throw TrackError("sidecar dims must have 3 entries");
    for (int i = 0; i < 3; ++i) v.dims[i] = dims[i].get<int>();
    if (v.dims[0] < 1 || v.dims[1] < 1 || v.dims[2] < 1)
        throw TrackError("sidecar dims must be >= 1");
    const double s = j.at("spacing_mm").get<double>();
    if (s <= 0.0) throw TrackError("sidecar spacing_mm must be > 0");
    v.spacing = Vec3::Constant(s);
    if (j.contains("origin_mm")) {
        const auto o = j.at("origin_mm");
        for (int i = 0; i < 3; ++i) v.origin[i] = o.at(i).get<double>();
    }

    std::ifstream f(path, std::ios::binary);
    if (!f) throw TrackError("cannot open file: " + path);
    v.data.resize(v.size());
    f.read(reinterpret_cast<char*>(v.data.data()),
           static_cast<std::streamsize>(v.data.size() * sizeof(float)));
    if (static_cast<std::size_t>(f.gcount()) != v.data.size() * sizeof(float))
        throw TrackError("raw file shorter than dims imply: " + path);
    return v;
}

void save_raw(const Volume& v, const std::string& path) {
    if (!v.is_isotropic())
        throw TrackError("raw format requires isotropic spacing: " + path);
    nlohmann::json j;
    j["dims"] = {v.dims[0], v.dims[1], v.dims[2]};
    j["spacing_mm"] = v.spacing[0];
    j["origin_mm"] = {v.origin[0], v.origin[1], v.origin[2]};
    std::ofstream side(sidecar_path(path));
    if (!side) throw TrackError("cannot write sidecar: " + sidecar_path(path));
    side << j.dump(2) << "\n";

    std::ofstream f(path, std::ios::binary);
    if (!f) throw TrackError("cannot write file: " + path);
    f.write(reinterpret_cast<const char*>(v.data.data()),
            static_cast<std::streamsize>(v.data.size() * sizeof(float)));
    if (!f) throw TrackError("write failed: " + path);
}

}  // namespace

double Grid::iso_spacing() const {
    if (!is_isotropic(1e-6))
        throw TrackError("operation requires isotropic spacing, got " +
                         std::to_string(spacing[0]) + "/" + std::to_string(spacing[1]) + "/" +
                         std::to_string(spacing[2]));
    return spacing[0];
}

float Volume::min_value() const {
    return data.empty() ? 0.0f : *std::min_element(data.begin(), data.end());
}

float Volume::max_value() const {
    return data.empty() ? 0.0f : *std::max_element(data.begin(), data.end());
}

std::size_t VoxelMask::count() const {
    return static_cast<std::size_t>(std::count_if(data.begin(), data.end(),
                                                  [](std::uint8_t b) { return b != 0; }));
}

Volume load_volume(const std::string& path) {
    if (ends_with(path, ".nii") || ends_with(path, ".nii.gz")) return load_nifti(path);
    if (ends_with(path, ".raw")) return load_raw(path);
    throw TrackError("unrecognized volume extension (want .nii, .nii.gz, or .raw): " + path);
}

void save_volume(const Volume& v, const std::string& path) {
    if (ends_with(path, ".nii") || ends_with(path, ".nii.gz")) {
        save_nifti_float(v, path);
        return;
    }
    if (ends_with(path, ".raw")) {
        save_raw(v, path);
        return;
    }
    throw TrackError("unrecognized volume extension (want .nii, .nii.gz, or .raw): " + path);
}

VoxelMask load_mask(const std::string& path) {
    const Volume v = load_volume(path);
    VoxelMask m(v);
    for (std::size_t i = 0; i < v.data.size(); ++i) m.data[i] = v.data[i] >= 0.5f ? 1 : 0;
    return m;
}

void save_mask(const VoxelMask& m, const std::string& path) {
    if (ends_with(path, ".nii") || ends_with(path, ".nii.gz")) {
        save_nifti_uint8(m, path);
        return;
    }
    Volume v;
    static_cast<Grid&>(v) = m;
    v.data.resize(m.data.size());
    for (std::size_t i = 0; i < m.data.size(); ++i) v.data[i] = m.data[i] ? 1.0f : 0.0f;
    save_volume(v, path);
}

void save_labels(const LabelVolume& l, const std::string& path) {
    if (ends_with(path, ".nii") || ends_with(path, ".nii.gz")) {
        save_nifti_int32(l, path);
        return;
    }
    Volume v;
    static_cast<Grid&>(v) = l;
    v.data.resize(l.data.size());
    for (std::size_t i = 0; i < l.data.size(); ++i) v.data[i] = static_cast<float>(l.data[i]);
    save_volume(v, path);
}

Volume resample_isotropic(const Volume& v, double target_mm) {
    if (target_mm <= 0.0) throw TrackError("resample target spacing must be > 0");

    std::array<int, 3> out_dims;
    for (int i = 0; i < 3; ++i) {
        const double extent = v.dims[i] * v.spacing[i];
        out_dims[i] = std::max(1, static_cast<int>(std::lround(extent / target_mm)));
    }
    Volume out(out_dims, target_mm, v.origin);

    const auto sample = [&](double gx, double gy, double gz) -> float {
        // Trilinear with clamp-to-edge in continuous voxel coordinates.
        const auto clamp = [](double t, int n) { return std::clamp(t, 0.0, double(n - 1)); };
        gx = clamp(gx, v.dims[0]);
        gy = clamp(gy, v.dims[1]);
        gz = clamp(gz, v.dims[2]);
        const int x0 = static_cast<int>(gx), y0 = static_cast<int>(gy), z0 = static_cast<int>(gz);
        const int x1 = std::min(x0 + 1, v.dims[0] - 1);
        const int y1 = std::min(y0 + 1, v.dims[1] - 1);
        const int z1 = std::min(z0 + 1, v.dims[2] - 1);
        const double fx = gx - x0, fy = gy - y0, fz = gz - z0;
        const double c00 = v.at(x0, y0, z0) * (1 - fx) + v.at(x1, y0, z0) * fx;
        const double c10 = v.at(x0, y1, z0) * (1 - fx) + v.at(x1, y1, z0) * fx;
        const double c01 = v.at(x0, y0, z1) * (1 - fx) + v.at(x1, y0, z1) * fx;
        const double c11 = v.at(x0, y1, z1) * (1 - fx) + v.at(x1, y1, z1) * fx;
        const double c0 = c00 * (1 - fy) + c10 * fy;
        const double c1 = c01 * (1 - fy) + c11 * fy;
        return static_cast<float>(c0 * (1 - fz) + c1 * fz);
    };

    for (int z = 0; z < out.dims[2]; ++z) {
        const double gz = z * target_mm / v.spacing[2];
        for (int y = 0; y < out.dims[1]; ++y) {
            const double gy = y * target_mm / v.spacing[1];
            for (int x = 0; x < out.dims[0]; ++x) {
                const double gx = x * target_mm / v.spacing[0];
                out.at(x, y, z) = sample(gx, gy, gz);
            }
        }
    }
    return out;
}

VoxelMask resample_mask_isotropic(const VoxelMask& m, double target_mm) {
    Volume v;
    static_cast<Grid&>(v) = m;
    v.data.resize(m.data.size());
    for (std::size_t i = 0; i < m.data.size(); ++i) v.data[i] = m.data[i] ? 1.0f : 0.0f;
    const Volume r = resample_isotropic(v, target_mm);
    VoxelMask out(r);
    for (std::size_t i = 0; i < r.data.size(); ++i) out.data[i] = r.data[i] >= 0.5f ? 1 : 0;
    return out;
}

Volume crop_z(const Volume& v, double zmin_mm, double zmax_mm) {
    int z0 = v.dims[2], z1 = -1;
    for (int z = 0; z < v.dims[2]; ++z) {
        const double zc = v.origin[2] + z * v.spacing[2];
        if (zc >= zmin_mm && zc <= zmax_mm) {
            z0 = std::min(z0, z);
            z1 = std::max(z1, z);
        }
    }
    if (z1 < z0) throw TrackError("crop range [" + std::to_string(zmin_mm) + ", " +
                                  std::to_string(zmax_mm) + "] keeps no slices");
    Volume out;
    static_cast<Grid&>(out) = v;
    out.dims[2] = z1 - z0 + 1;
    out.origin[2] = v.origin[2] + z0 * v.spacing[2];
    out.data.resize(out.size());
    const std::size_t slice = static_cast<std::size_t>(v.dims[0]) * v.dims[1];
    std::copy(v.data.begin() + z0 * slice, v.data.begin() + (z1 + 1) * slice, out.data.begin());
    return out;
}

}  // namespace tubetrack
