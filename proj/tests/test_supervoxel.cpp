#include <doctest.h>

#include <queue>
#include <vector>

#include "tubetrack/rng.hpp"
#include "tubetrack/supervoxel.hpp"
#include "tubetrack/volume.hpp"

using namespace tubetrack;

namespace {

struct BoxSetup {
    Volume feature;
    VoxelMask mask;
};

BoxSetup solid_box(int n, double spacing, float fill = 1.0f) {
    BoxSetup s;
    s.feature = Volume({n, n, n}, spacing);
    s.feature.data.assign(s.feature.size(), fill);
    s.mask = VoxelMask(s.feature, 1);
    return s;
}

// Count the 26-connected components of one supervoxel id.
int component_count(const LabelVolume& labels, int id) {
    std::vector<char> seen(labels.size(), 0);
    int components = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels.data[i] != id || seen[i]) continue;
        ++components;
        std::queue<std::size_t> q;
        q.push(i);
        seen[i] = 1;
        while (!q.empty()) {
            const auto c = labels.coords(q.front());
            q.pop();
            for (int dz = -1; dz <= 1; ++dz)
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (!dx && !dy && !dz) continue;
                        const int x = c[0] + dx, y = c[1] + dy, z = c[2] + dz;
                        if (!labels.in_bounds(x, y, z)) continue;
                        const std::size_t j = labels.index(x, y, z);
                        if (labels.data[j] == id && !seen[j]) {
                            seen[j] = 1;
                            q.push(j);
                        }
                    }
        }
    }
    return components;
}

}  // namespace

TEST_SUITE("supervoxel") {

TEST_CASE("partition covers the mask exactly") {
    BoxSetup s = solid_box(16, 2.0);
    // carve a notch so the mask is not a plain cube
    for (int z = 0; z < 16; ++z)
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x) s.mask.at(x, y, z) = 0;

    const SupervoxelLabeling sv = slic_supervoxels(s.feature, s.mask, 216.0, 0.01);
    REQUIRE(sv.count > 0);
    for (std::size_t i = 0; i < s.mask.size(); ++i) {
        if (s.mask.data[i])
            CHECK(sv.labels.data[i] >= 1);
        else
            CHECK(sv.labels.data[i] == 0);
        CHECK(sv.labels.data[i] <= sv.count);
    }
}

TEST_CASE("supervoxel count tracks the target volume") {
    BoxSetup s = solid_box(16, 2.0);  // 32768 mm^3 total
    const SupervoxelLabeling sv = slic_supervoxels(s.feature, s.mask, 512.0, 0.01);
    const double expected = 32768.0 / 512.0;  // 64 cells
    CHECK(sv.count > expected / 2);
    CHECK(sv.count < expected * 2);
}

TEST_CASE("per-id statistics are consistent with the labeling") {
    BoxSetup s = solid_box(12, 1.5);
    Rng rng(31);
    for (float& f : s.feature.data) f = static_cast<float>(rng.uniform(0.0, 1.0));
    const SupervoxelLabeling sv = slic_supervoxels(s.feature, s.mask, 100.0, 0.05);

    std::vector<int> counts(sv.count + 1, 0);
    std::vector<Vec3> centroid(sv.count + 1, Vec3::Zero());
    std::vector<double> feat(sv.count + 1, 0.0);
    for (std::size_t i = 0; i < sv.labels.size(); ++i) {
        const int id = sv.labels.data[i];
        if (id == 0) continue;
        ++counts[id];
        centroid[id] += sv.labels.voxel_center_mm(i);
        feat[id] += s.feature.data[i];
    }
    int total = 0;
    for (int id = 1; id <= sv.count; ++id) {
        REQUIRE(counts[id] > 0);
        total += counts[id];
        CHECK((sv.centroid_mm[id] - centroid[id] / counts[id]).norm() < 1e-9);
        CHECK(sv.mean_feature[id] == doctest::Approx(feat[id] / counts[id]).epsilon(1e-9));
        CHECK(sv.voxel_count[id] == counts[id]);
    }
    CHECK(static_cast<std::size_t>(total) == s.mask.count());
}

TEST_CASE("every supervoxel is 26-connected") {
    BoxSetup s = solid_box(14, 2.0);
    Rng rng(77);
    for (float& f : s.feature.data) f = static_cast<float>(rng.uniform(0.0, 1.0));
    const SupervoxelLabeling sv = slic_supervoxels(s.feature, s.mask, 300.0, 0.01);
    for (int id = 1; id <= sv.count; ++id) CHECK(component_count(sv.labels, id) == 1);
}

TEST_CASE("clustering is deterministic") {
    BoxSetup s = solid_box(12, 2.0);
    Rng rng(5);
    for (float& f : s.feature.data) f = static_cast<float>(rng.uniform(0.0, 1.0));
    const SupervoxelLabeling a = slic_supervoxels(s.feature, s.mask, 216.0, 0.01);
    const SupervoxelLabeling b = slic_supervoxels(s.feature, s.mask, 216.0, 0.01, 12345);
    CHECK(a.count == b.count);
    CHECK(a.labels.data == b.labels.data);
}

TEST_CASE("invalid inputs are rejected") {
    BoxSetup s = solid_box(8, 2.0);
    VoxelMask empty = s.mask;
    empty.data.assign(empty.size(), 0);
    CHECK_THROWS_AS(slic_supervoxels(s.feature, empty, 216.0, 0.01), TrackError);
    CHECK_THROWS_AS(slic_supervoxels(s.feature, s.mask, 0.0, 0.01), TrackError);

    VoxelMask wrong_grid;
    wrong_grid.dims = {4, 4, 4};
    wrong_grid.spacing = Vec3::Constant(2.0);
    wrong_grid.data.assign(wrong_grid.size(), 1);
    CHECK_THROWS_AS(slic_supervoxels(s.feature, wrong_grid, 216.0, 0.01), TrackError);
}

}  // TEST_SUITE
