#include "tubetrack/cylinders.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Geometry>

#include "tubetrack/parallel.hpp"
#include "tubetrack/rng.hpp"

namespace tubetrack {

namespace {

// Orients a unit axis so its largest-magnitude component is non-negative.
Vec3 canonical_axis(Vec3 axis) {
    int dominant = 0;
    for (int k = 1; k < 3; ++k)
        if (std::abs(axis[k]) > std::abs(axis[dominant])) dominant = k;
    if (axis[dominant] < 0.0) axis = -axis;
    return axis;
}

struct Candidate {
    Vec3 center;
    Vec3 axis;
    double radius;
    bool ok = false;
};

// Axis = normal of the plane through three points; center/radius from their
// circumcircle inside that plane.
Candidate candidate_from_triplet(const Vec3& p0, const Vec3& p1, const Vec3& p2) {
    Candidate c;
    const Vec3 a = p1 - p0;
    const Vec3 b = p2 - p0;
    const Vec3 n = a.cross(b);
    const double n2 = n.squaredNorm();
    if (n2 < 1e-18) return c;  // collinear triplet

    const double aa = a.squaredNorm();
    const double bb = b.squaredNorm();
    const double ab = a.dot(b);
    const double det = aa * bb - ab * ab;
    if (det < 1e-18) return c;
    const double alpha = 0.5 * bb * (aa - ab) / det;
    const double beta = 0.5 * aa * (bb - ab) / det;

    c.center = p0 + alpha * a + beta * b;
    c.axis = n / std::sqrt(n2);
    c.radius = (p0 - c.center).norm();
    c.ok = std::isfinite(c.radius) && c.radius > 0.0;
    return c;
}

double surface_distance(const Vec3& p, const Vec3& center, const Vec3& axis, double radius) {
    const Vec3 d = p - center;
    const double t = d.dot(axis);
    const double radial = (d - t * axis).norm();
    return std::abs(radial - radius);
}

Vec3 any_orthonormal(const Vec3& a) {
    return a.cross(std::abs(a[0]) < 0.9 ? Vec3::UnitX() : Vec3::UnitY()).normalized();
}

struct CircleFit {
    Vec3 center = Vec3::Zero();  // lies in the plane through the anchor
    double radius = 0.0;
    double sse = std::numeric_limits<double>::infinity();
    bool ok = false;
};

// Projects the selected points onto the plane through `anchor` perpendicular
// to `axis` and fits a circle algebraically (linear least squares on the
// circle equation), scoring it with the geometric squared residuals.
CircleFit fit_circle_on_plane(const std::vector<Vec3>& points, const std::vector<std::size_t>& sel,
                              const Vec3& anchor, const Vec3& axis) {
    CircleFit f;
    if (sel.size() < 3) return f;
    const Vec3 u = any_orthonormal(axis);
    const Vec3 v = axis.cross(u);
    double sxx = 0, sxy = 0, syy = 0, sx = 0, sy = 0, sxz = 0, syz = 0, sz = 0;
    for (const std::size_t i : sel) {
        const Vec3 d = points[i] - anchor;
        const double x = d.dot(u), y = d.dot(v), z = x * x + y * y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        sx += x;
        sy += y;
        sxz += x * z;
        syz += y * z;
        sz += z;
    }
    Eigen::Matrix3d m;
    m << sxx, sxy, sx, sxy, syy, sy, sx, sy, static_cast<double>(sel.size());
    const Eigen::Vector3d sol = m.fullPivLu().solve(Eigen::Vector3d(sxz, syz, sz));
    const double cx = 0.5 * sol[0], cy = 0.5 * sol[1];
    const double r2 = sol[2] + cx * cx + cy * cy;
    if (!std::isfinite(r2) || r2 <= 0.0) return f;
    f.radius = std::sqrt(r2);
    f.center = anchor + cx * u + cy * v;
    f.sse = 0.0;
    for (const std::size_t i : sel) {
        const Vec3 d = points[i] - anchor;
        const double x = d.dot(u) - cx, y = d.dot(v) - cy;
        const double e = std::sqrt(x * x + y * y) - f.radius;
        f.sse += e * e;
    }
    f.ok = true;
    return f;
}

}  // namespace

Cylinder fit_cylinder_ransac(const std::vector<Vec3>& points, const RansacParams& params) {
    Cylinder out;
    const std::size_t n = points.size();
    if (n < 3) return out;

    // Keep a short list of the best axis-distinct candidates: refinement is
    // a local search, so when the top consensus model sits in the wrong
    // basin (a ghost alignment through the outliers), one of the runners-up
    // usually holds the true one.
    constexpr int kKeep = 8;
    constexpr double kDistinctCos = 0.985;  // ~10 degrees
    std::vector<std::pair<int, Candidate>> top;  // (inlier count, candidate)
    Rng rng(params.seed);
    for (int it = 0; it < params.iterations; ++it) {
        const std::size_t i0 = rng.next_below(n);
        std::size_t i1 = rng.next_below(n - 1);
        if (i1 >= i0) ++i1;
        std::size_t i2 = rng.next_below(n - 2);
        if (i2 >= std::min(i0, i1)) ++i2;
        if (i2 >= std::max(i0, i1)) ++i2;

        Candidate cand = candidate_from_triplet(points[i0], points[i1], points[i2]);
        if (!cand.ok) continue;
        if (cand.radius < params.min_radius_mm || cand.radius > params.max_radius_mm) continue;

        int inliers = 0;
        for (const Vec3& p : points)
            if (surface_distance(p, cand.center, cand.axis, cand.radius) <= params.inlier_tol_mm)
                ++inliers;

        bool absorbed = false;
        for (auto& [cnt, c] : top) {
            if (std::abs(c.axis.dot(cand.axis)) < kDistinctCos) continue;
            if (inliers > cnt) {
                cnt = inliers;
                c = cand;
            }
            absorbed = true;
            break;
        }
        if (!absorbed) {
            if (static_cast<int>(top.size()) < kKeep) {
                top.push_back({inliers, cand});
            } else {
                auto worst =
                    std::min_element(top.begin(), top.end(),
                                     [](const auto& a, const auto& b) { return a.first < b.first; });
                if (inliers > worst->first) *worst = {inliers, cand};
            }
        }
    }
    int best_inliers = 0;
    for (const auto& [cnt, c] : top) best_inliers = std::max(best_inliers, cnt);
    if (best_inliers < params.min_support || top.empty()) return out;

    // Refine each kept candidate on its consensus set: alternate a projected
    // circle fit with a shrinking axis-tilt search (the three-point axis is
    // the noisiest part of the minimal model), reselecting inliers under the
    // improved model between rounds. The refined models then compete on
    // final inlier count.
    struct Refined {
        Vec3 axis = Vec3::UnitZ();
        Vec3 center = Vec3::Zero();
        double radius = 0.0;
        int count = 0;
        double sse = std::numeric_limits<double>::infinity();
    };
    const auto refine = [&](const Candidate& c0) {
        Refined r;
        Vec3 axis = c0.axis;
        Vec3 center = c0.center;
        double radius = c0.radius;
        double sse = std::numeric_limits<double>::infinity();
        std::vector<std::size_t> sel;
        for (int round = 0; round < 6; ++round) {
            sel.clear();
            for (std::size_t i = 0; i < n; ++i)
                if (surface_distance(points[i], center, axis, radius) <= params.inlier_tol_mm)
                    sel.push_back(i);
            if (sel.size() < 3) break;

            CircleFit cur = fit_circle_on_plane(points, sel, center, axis);
            if (!cur.ok) break;
            constexpr double kDeg = 3.14159265358979323846 / 180.0;
            double step = 6.0 * kDeg;
            int evals = 0;
            while (step > 0.05 * kDeg && evals < 400) {
                const Vec3 u = any_orthonormal(axis);
                const Vec3 v = axis.cross(u);
                const std::array<Vec3, 4> dirs{u, Vec3(-u), v, Vec3(-v)};
                CircleFit best_cf;
                Vec3 best_axis = axis;
                for (const Vec3& w : dirs) {
                    const Vec3 cand = (std::cos(step) * axis + std::sin(step) * w).normalized();
                    const CircleFit cf = fit_circle_on_plane(points, sel, cur.center, cand);
                    ++evals;
                    if (cf.ok && cf.sse < best_cf.sse) {
                        best_cf = cf;
                        best_axis = cand;
                    }
                }
                if (best_cf.ok && best_cf.sse < cur.sse) {
                    cur = best_cf;
                    axis = best_axis;
                } else {
                    step *= 0.5;
                }
            }
            if (cur.radius < params.min_radius_mm || cur.radius > params.max_radius_mm) break;
            center = cur.center;
            radius = cur.radius;
            sse = cur.sse;
        }
        r.axis = axis;
        r.center = center;
        r.radius = radius;
        r.sse = sse;
        for (std::size_t i = 0; i < n; ++i)
            if (surface_distance(points[i], center, axis, radius) <= params.inlier_tol_mm) ++r.count;
        return r;
    };

    Refined win;
    bool have = false;
    for (const auto& [cnt, c] : top) {
        if (cnt < params.min_support) continue;
        const Refined r = refine(c);
        if (r.count < params.min_support) continue;
        if (!have || r.count > win.count || (r.count == win.count && r.sse < win.sse)) {
            win = r;
            have = true;
        }
    }
    if (!have) {
        // refinement rejected everything; fall back to the raw consensus winner
        auto it = std::max_element(top.begin(), top.end(), [](const auto& a, const auto& b) {
            return a.first < b.first;
        });
        win.axis = it->second.axis;
        win.center = it->second.center;
        win.radius = it->second.radius;
        win.count = it->first;
    }

    // The infinite-cylinder model leaves the axial center position free; pin
    // it to the mean of the inlier projections onto the axis line.
    const Vec3 axis = canonical_axis(win.axis);
    Vec3 sum = Vec3::Zero();
    int count = 0;
    for (const Vec3& p : points) {
        if (surface_distance(p, win.center, axis, win.radius) > params.inlier_tol_mm) continue;
        const double t = (p - win.center).dot(axis);
        sum += win.center + t * axis;
        ++count;
    }

    out.center = count > 0 ? Vec3(sum / count) : win.center;
    out.axis = axis;
    out.radius_mm = win.radius;
    out.inlier_count = count > 0 ? count : win.count;
    out.valid = true;
    return out;
}

std::vector<Cylinder> fit_local_cylinders(const std::vector<Vec3>& peaks_mm,
                                          const VoxelMask& walls_bin, double patch_mm,
                                          double height_mm, const RansacParams& params,
                                          int threads) {
    const double half = 0.5 * patch_mm;
    std::vector<Cylinder> fits(peaks_mm.size());

    parallel_for(peaks_mm.size(), [&](std::size_t pi) {
        const Vec3& peak = peaks_mm[pi];
        std::vector<Vec3> cloud;
        auto lo = walls_bin.nearest_voxel(peak - Vec3(half, half, half));
        auto hi = walls_bin.nearest_voxel(peak + Vec3(half, half, half));
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::max(lo[a], 0);
            hi[a] = std::min(hi[a], walls_bin.dims[a] - 1);
        }
        for (int z = lo[2]; z <= hi[2]; ++z) {
            for (int y = lo[1]; y <= hi[1]; ++y) {
                for (int x = lo[0]; x <= hi[0]; ++x) {
                    if (!walls_bin.data[walls_bin.index(x, y, z)]) continue;
                    const Vec3 p = walls_bin.voxel_center_mm(x, y, z);
                    if ((p - peak).cwiseAbs().maxCoeff() <= half) cloud.push_back(p);
                }
            }
        }
        RansacParams local = params;
        local.seed = hash_counter(params.seed, static_cast<std::uint64_t>(pi));
        fits[pi] = fit_cylinder_ransac(cloud, local);
        fits[pi].height_mm = height_mm;
    }, threads);

    return fits;
}

}  // namespace tubetrack
