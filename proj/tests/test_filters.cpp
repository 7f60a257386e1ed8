#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tubetrack/filters.hpp"
#include "tubetrack/rng.hpp"
#include "tubetrack/volume.hpp"

using namespace tubetrack;

namespace {

// Bright volume with one dark axial sheet at z = sheet_z.
Volume dark_sheet_volume(int n, int sheet_z) {
    Volume v({n, n, n}, 1.0);
    v.data.assign(v.size(), 200.0f);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) v.at(x, y, sheet_z) = 50.0f;
    return v;
}

VoxelMask random_mask(std::array<int, 3> dims, double spacing, double density, Rng& rng) {
    VoxelMask m;
    m.dims = dims;
    m.spacing = Vec3::Constant(spacing);
    m.data.assign(m.size(), 0);
    for (auto& b : m.data) b = rng.next_double() < density ? 1 : 0;
    if (m.count() == 0) m.data[rng.next_below(m.size())] = 1;
    return m;
}

bool volumes_identical(const Volume& a, const Volume& b) {
    if (a.dims != b.dims || a.data.size() != b.data.size()) return false;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        if (a.data[i] != b.data[i]) return false;
    return true;
}

}  // namespace

TEST_SUITE("filters") {

TEST_CASE("valley filter highlights a dark sheet between bright regions") {
    const int n = 32, sheet = 16;
    const Volume v = dark_sheet_volume(n, sheet);
    const Volume r = meijering_valley(v, {2.0, 3.0}, true);

    REQUIRE(r.dims == v.dims);
    CHECK(r.min_value() >= 0.0f);
    CHECK(r.max_value() == doctest::Approx(1.0f));

    // response on the sheet dwarfs the response far away from it
    double on_sheet = 0.0, off_sheet = 0.0;
    int cnt_on = 0, cnt_off = 0;
    for (int y = 8; y < 24; ++y)
        for (int x = 8; x < 24; ++x) {
            on_sheet += r.at(x, y, sheet);
            ++cnt_on;
            off_sheet += r.at(x, y, 4);
            ++cnt_off;
        }
    on_sheet /= cnt_on;
    off_sheet /= cnt_off;
    CHECK(on_sheet > 0.5);
    CHECK(off_sheet < 0.1 * on_sheet);
}

TEST_CASE("dark_sheets=false targets bright sheets instead") {
    const int n = 32, sheet = 16;
    Volume v({n, n, n}, 1.0);
    v.data.assign(v.size(), 50.0f);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) v.at(x, y, sheet) = 200.0f;
    const Volume r = meijering_valley(v, {2.0, 3.0}, false);
    double on_sheet = 0.0;
    for (int y = 8; y < 24; ++y)
        for (int x = 8; x < 24; ++x) on_sheet += r.at(x, y, sheet);
    on_sheet /= 16.0 * 16.0;
    CHECK(on_sheet > 0.5);
}

TEST_CASE("valley filter is deterministic across thread counts") {
    const Volume v = dark_sheet_volume(24, 12);
    const Volume a = meijering_valley(v, {2.0, 3.0}, true, 1);
    const Volume b = meijering_valley(v, {2.0, 3.0}, true, 4);
    CHECK(volumes_identical(a, b));
}

TEST_CASE("binarize_walls thresholds and validates its threshold") {
    Volume r({2, 2, 1}, 1.0);
    r.data = {0.1f, 0.5f, 0.7f, 0.49f};
    const VoxelMask m = binarize_walls(r, 0.5);
    CHECK(m.data == std::vector<std::uint8_t>{0, 1, 1, 0});
    CHECK_THROWS_AS(binarize_walls(r, 0.0), TrackError);
    CHECK_THROWS_AS(binarize_walls(r, 1.0), TrackError);
    CHECK_THROWS_AS(binarize_walls(r, -0.2), TrackError);
}

TEST_CASE("distance transform matches brute force exactly on random masks") {
    const double spacings[] = {1.0, 2.0, 1.5};
    Rng rng(991);
    for (int trial = 0; trial < 12; ++trial) {
        const std::array<int, 3> dims = {4 + static_cast<int>(rng.next_below(13)),
                                         4 + static_cast<int>(rng.next_below(13)),
                                         4 + static_cast<int>(rng.next_below(13))};
        const VoxelMask m = random_mask(dims, spacings[trial % 3], 0.05 + 0.3 * rng.next_double(), rng);
        const Volume fast = euclidean_distance_transform(m);
        const Volume slow = oracles::brute_force_edt(m);
        REQUIRE(fast.data.size() == slow.data.size());
        bool equal = true;
        for (std::size_t i = 0; i < fast.data.size(); ++i)
            if (fast.data[i] != slow.data[i]) equal = false;
        CHECK(equal);
    }
}

TEST_CASE("distance transform corner cases") {
    VoxelMask empty;
    empty.dims = {4, 4, 4};
    empty.spacing = Vec3::Constant(1.0);
    empty.data.assign(empty.size(), 0);
    CHECK_THROWS_AS(euclidean_distance_transform(empty), TrackError);

    VoxelMask full = empty;
    full.data.assign(full.size(), 1);
    const Volume zero = euclidean_distance_transform(full);
    for (float f : zero.data) CHECK(f == 0.0f);

    VoxelMask corner = empty;
    corner.at(0, 0, 0) = 1;
    corner.spacing = Vec3::Constant(2.0);
    const Volume d = euclidean_distance_transform(corner);
    CHECK(d.at(3, 3, 3) == doctest::Approx(std::sqrt(27.0) * 2.0));
    CHECK(d.at(0, 0, 0) == 0.0f);
    CHECK(d.at(1, 0, 0) == doctest::Approx(2.0));
}

TEST_CASE("distance transform is deterministic across thread counts") {
    Rng rng(5511);
    const VoxelMask m = random_mask({15, 11, 13}, 1.5, 0.1, rng);
    const Volume a = euclidean_distance_transform(m, 1);
    const Volume b = euclidean_distance_transform(m, 4);
    CHECK(volumes_identical(a, b));
}

TEST_CASE("invert_or combines segmentation complement with walls") {
    VoxelMask seg;
    seg.dims = {2, 2, 1};
    seg.spacing = Vec3::Constant(1.0);
    seg.data = {1, 1, 0, 0};
    VoxelMask walls = seg;
    walls.data = {1, 0, 1, 0};
    const VoxelMask out = invert_or(seg, walls);
    // NOT(seg) OR walls
    CHECK(out.data == std::vector<std::uint8_t>{1, 0, 1, 1});
}

}  // TEST_SUITE
