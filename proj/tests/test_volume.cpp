#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "tubetrack/nifti.hpp"
#include "tubetrack/rng.hpp"
#include "tubetrack/volume.hpp"

using namespace tubetrack;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("tubetrack_test_" + tag);
    fs::create_directories(dir);
    return dir;
}

Volume random_volume(std::array<int, 3> dims, double spacing, std::uint64_t seed) {
    Volume v(dims, spacing, Vec3(1.5, -2.0, 3.25));
    Rng rng(seed);
    for (float& f : v.data) f = static_cast<float>(rng.uniform(-100.0, 300.0));
    return v;
}

}  // namespace

TEST_SUITE("volume") {

TEST_CASE("grid index and coords round-trip") {
    Grid g;
    g.dims = {5, 7, 3};
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto c = g.coords(i);
        CHECK(g.index(c[0], c[1], c[2]) == i);
        CHECK(g.in_bounds(c[0], c[1], c[2]));
    }
    CHECK(g.size() == 105);
    CHECK_FALSE(g.in_bounds(-1, 0, 0));
    CHECK_FALSE(g.in_bounds(5, 0, 0));
    CHECK_FALSE(g.in_bounds(0, 7, 0));
    CHECK_FALSE(g.in_bounds(0, 0, 3));
}

TEST_CASE("voxel centers and nearest voxel invert each other") {
    Grid g;
    g.dims = {10, 10, 10};
    g.spacing = Vec3(2.0, 2.0, 2.0);
    g.origin = Vec3(5.0, -3.0, 0.5);
    for (int x : {0, 3, 9})
        for (int y : {0, 5, 9})
            for (int z : {0, 2, 9}) {
                const Vec3 p = g.voxel_center_mm(x, y, z);
                const auto n = g.nearest_voxel(p);
                CHECK(n[0] == x);
                CHECK(n[1] == y);
                CHECK(n[2] == z);
            }
    // off-center positions round to the closest voxel
    const Vec3 p = g.voxel_center_mm(3, 3, 3) + Vec3(0.9, -0.9, 0.4);
    const auto n = g.nearest_voxel(p);
    CHECK(n[0] == 3);
    CHECK(n[1] == 3);
    CHECK(n[2] == 3);
}

TEST_CASE("iso_spacing accepts isotropic grids and rejects anisotropic ones") {
    Grid g;
    g.dims = {4, 4, 4};
    g.spacing = Vec3(1.5, 1.5, 1.5);
    CHECK(g.iso_spacing() == doctest::Approx(1.5));
    g.spacing = Vec3(1.0, 1.0, 2.0);
    CHECK_FALSE(g.is_isotropic());
    CHECK_THROWS_AS(g.iso_spacing(), TrackError);
}

TEST_CASE("min, max, and mask count") {
    Volume v({3, 3, 3}, 1.0);
    v.data.assign(v.size(), 2.0f);
    v.at(1, 1, 1) = -5.0f;
    v.at(2, 2, 2) = 9.0f;
    CHECK(v.min_value() == -5.0f);
    CHECK(v.max_value() == 9.0f);

    VoxelMask m(v);
    m.at(0, 0, 0) = 1;
    m.at(1, 2, 0) = 1;
    CHECK(m.count() == 2);
}

TEST_CASE("nifti round-trip preserves data, spacing, and origin") {
    const fs::path dir = temp_dir("nifti");
    const Volume v = random_volume({7, 5, 4}, 1.25, 42);
    for (const std::string name : {"vol.nii", "vol.nii.gz"}) {
        const std::string file = (dir / name).string();
        save_volume(v, file);
        const Volume r = load_volume(file);
        REQUIRE(r.dims == v.dims);
        CHECK((r.spacing - v.spacing).norm() < 1e-5);
        CHECK((r.origin - v.origin).norm() < 1e-4);
        REQUIRE(r.data.size() == v.data.size());
        bool equal = true;
        for (std::size_t i = 0; i < v.data.size(); ++i)
            if (r.data[i] != v.data[i]) equal = false;
        CHECK(equal);
    }
}

TEST_CASE("raw round-trip with sidecar") {
    const fs::path dir = temp_dir("raw");
    const Volume v = random_volume({6, 6, 6}, 2.0, 7);
    const std::string file = (dir / "vol.raw").string();
    save_volume(v, file);
    CHECK(fs::exists(dir / "vol.json"));
    const Volume r = load_volume(file);
    REQUIRE(r.dims == v.dims);
    bool equal = true;
    for (std::size_t i = 0; i < v.data.size(); ++i)
        if (r.data[i] != v.data[i]) equal = false;
    CHECK(equal);
}

TEST_CASE("mask save/load thresholds at 0.5") {
    const fs::path dir = temp_dir("mask");
    VoxelMask m;
    m.dims = {4, 4, 4};
    m.spacing = Vec3::Constant(1.0);
    m.data.assign(m.size(), 0);
    m.at(1, 1, 1) = 1;
    m.at(2, 3, 0) = 1;
    const std::string file = (dir / "mask.nii.gz").string();
    save_mask(m, file);
    const VoxelMask r = load_mask(file);
    REQUIRE(r.dims == m.dims);
    CHECK(r.data == m.data);
}

TEST_CASE("label volume saves as int32 nifti") {
    const fs::path dir = temp_dir("labels");
    LabelVolume l;
    l.dims = {4, 3, 2};
    l.spacing = Vec3::Constant(2.0);
    l.data.assign(l.size(), 0);
    l.at(0, 0, 0) = 3;
    l.at(3, 2, 1) = 77;
    const std::string file = (dir / "labels.nii.gz").string();
    save_labels(l, file);
    const Volume r = load_volume(file);
    REQUIRE(r.dims == l.dims);
    CHECK(r.at(0, 0, 0) == 3.0f);
    CHECK(r.at(3, 2, 1) == 77.0f);
    CHECK(r.at(1, 1, 1) == 0.0f);
}

TEST_CASE("loading a missing file or unknown extension fails") {
    CHECK_THROWS_AS(load_volume("/nonexistent/nowhere.nii.gz"), TrackError);
    CHECK_THROWS_AS(load_volume("/tmp/file.unknown_ext"), TrackError);
}

TEST_CASE("resample_isotropic keeps constant fields and halves dims for doubled spacing") {
    Volume v({8, 8, 8}, 1.0);
    v.data.assign(v.size(), 3.5f);
    const Volume r = resample_isotropic(v, 2.0);
    CHECK(r.dims == std::array<int, 3>{4, 4, 4});
    CHECK(r.iso_spacing() == doctest::Approx(2.0));
    for (float f : r.data) CHECK(f == doctest::Approx(3.5f));
}

TEST_CASE("resample_isotropic is exact for linear ramps in the interior") {
    Volume v({9, 9, 9}, 1.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto c = v.coords(i);
        v.data[i] = static_cast<float>(2.0 * c[0] + 0.5 * c[1] - c[2]);
    }
    const Volume r = resample_isotropic(v, 1.5);
    // interior sample positions interpolate the ramp exactly
    for (int k = 1; k < r.nz() - 1; ++k) {
        const Vec3 p = r.voxel_center_mm(2, 2, k);
        const double expect = 2.0 * p[0] + 0.5 * p[1] - p[2];
        CHECK(r.at(2, 2, k) == doctest::Approx(expect).epsilon(1e-4));
    }
}

TEST_CASE("resample_mask_isotropic keeps solid regions solid") {
    VoxelMask m;
    m.dims = {12, 12, 12};
    m.spacing = Vec3::Constant(1.0);
    m.data.assign(m.size(), 0);
    for (int z = 2; z < 10; ++z)
        for (int y = 2; y < 10; ++y)
            for (int x = 2; x < 10; ++x) m.at(x, y, z) = 1;
    const VoxelMask r = resample_mask_isotropic(m, 2.0);
    CHECK(r.dims == std::array<int, 3>{6, 6, 6});
    // voxels deep inside the cube stay set; corners outside stay clear
    CHECK(r.at(3, 3, 3) == 1);
    CHECK(r.at(0, 0, 0) == 0);
}

TEST_CASE("crop_z keeps the requested slab and shifts the origin") {
    Volume v({4, 4, 6}, 2.0);
    for (std::size_t i = 0; i < v.size(); ++i)
        v.data[i] = static_cast<float>(v.coords(i)[2]);
    const Volume r = crop_z(v, 4.0, 8.0);  // slice centers at z = 4, 6, 8
    CHECK(r.dims == std::array<int, 3>{4, 4, 3});
    CHECK(r.origin[2] == doctest::Approx(4.0));
    CHECK(r.at(0, 0, 0) == 2.0f);
    CHECK(r.at(0, 0, 2) == 4.0f);
}

}  // TEST_SUITE
