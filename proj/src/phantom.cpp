#include "tubetrack/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Geometry>

#include "tubetrack/parallel.hpp"
#include "tubetrack/rng.hpp"

namespace tubetrack {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Centripetal Catmull-Rom (Barry-Goldman pyramid, alpha = 0.5). Unlike the
// uniform variant it does not overshoot when control points are unevenly
// spaced, which keeps the bend radius of interpolated layouts predictable.
Vec3 catmull_rom_centripetal(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3,
                             double u) {
    const auto knot = [](const Vec3& a, const Vec3& b) {
        return std::max(std::sqrt((b - a).norm()), 1e-9);
    };
    const double t0 = 0.0;
    const double t1 = t0 + knot(p0, p1);
    const double t2 = t1 + knot(p1, p2);
    const double t3 = t2 + knot(p2, p3);
    const double t = t1 + u * (t2 - t1);

    const Vec3 a1 = (t1 - t) / (t1 - t0) * p0 + (t - t0) / (t1 - t0) * p1;
    const Vec3 a2 = (t2 - t) / (t2 - t1) * p1 + (t - t1) / (t2 - t1) * p2;
    const Vec3 a3 = (t3 - t) / (t3 - t2) * p2 + (t - t2) / (t3 - t2) * p3;
    const Vec3 b1 = (t2 - t) / (t2 - t0) * a1 + (t - t0) / (t2 - t0) * a2;
    const Vec3 b2 = (t3 - t) / (t3 - t1) * a2 + (t - t1) / (t3 - t1) * a3;
    return (t2 - t) / (t2 - t1) * b1 + (t - t1) / (t2 - t1) * b2;
}

// Densely samples a centripetal Catmull-Rom spline through the control points.
std::vector<Vec3> sample_spline(const std::vector<Vec3>& ctrl, double step_mm) {
    std::vector<Vec3> out;
    if (ctrl.size() == 2) {
        const double len = (ctrl[1] - ctrl[0]).norm();
        const int n = std::max(1, static_cast<int>(std::ceil(len / step_mm)));
        for (int k = 0; k <= n; ++k)
            out.push_back(ctrl[0] + (static_cast<double>(k) / n) * (ctrl[1] - ctrl[0]));
        return out;
    }
    for (std::size_t i = 0; i + 1 < ctrl.size(); ++i) {
        // Mirrored virtual endpoints keep the knot spacing non-degenerate at
        // the curve ends.
        const Vec3 p0 = i == 0 ? Vec3(2.0 * ctrl[0] - ctrl[1]) : ctrl[i - 1];
        const Vec3& p1 = ctrl[i];
        const Vec3& p2 = ctrl[i + 1];
        const Vec3 p3 = i + 2 < ctrl.size() ? ctrl[i + 2]
                                            : Vec3(2.0 * ctrl.back() - ctrl[ctrl.size() - 2]);
        const double chord = (p2 - p1).norm();
        const int n = std::max(1, static_cast<int>(std::ceil(chord / step_mm)));
        for (int k = 0; k < n; ++k)
            out.push_back(catmull_rom_centripetal(p0, p1, p2, p3, static_cast<double>(k) / n));
    }
    out.push_back(ctrl.back());
    return out;
}

std::vector<Vec3> straight_centerline(const PhantomSpec& spec, const Vec3& extent, double step) {
    const double margin = spec.tube_radius_mm + 2.0 * spec.spacing_mm;
    double length = spec.straight_length_mm;
    if (length <= 0.0) length = extent[0] - 2.0 * margin;
    const Vec3 c = 0.5 * extent;
    const Vec3 a(c[0] - 0.5 * length, c[1], c[2]);
    const Vec3 b(c[0] + 0.5 * length, c[1], c[2]);
    return sample_spline({a, b}, step);
}

std::vector<Vec3> helix_centerline(const PhantomSpec& spec, const Vec3& extent, double step) {
    const double R = spec.helix_radius_mm;
    const double pitch = spec.helix_pitch_mm;
    const double theta_max = 2.0 * kPi * spec.helix_turns;
    const double dz_dtheta = pitch / (2.0 * kPi);
    const double speed = std::sqrt(R * R + dz_dtheta * dz_dtheta);
    const double dtheta = step / speed;
    const Vec3 c = 0.5 * extent;
    const double z0 = c[2] - 0.5 * dz_dtheta * theta_max;

    std::vector<Vec3> out;
    for (double theta = 0.0; theta < theta_max; theta += dtheta)
        out.push_back({c[0] + R * std::cos(theta), c[1] + R * std::sin(theta),
                       z0 + dz_dtheta * theta});
    out.push_back({c[0] + R * std::cos(theta_max), c[1] + R * std::sin(theta_max),
                   z0 + dz_dtheta * theta_max});
    return out;
}

// Waypoints are emitted a few millimetres apart so the interpolating spline
// cannot dip below the bend radius the layout was designed with (a sparse
// polygon lets the spline overshoot at line/arc junctions).

// Appends a gently wavy run from `from` to `to`, displaced along `perp` by a
// smooth window that vanishes (with zero slope) at both ends so the junctions
// to the adjoining turns stay tangent. Perfectly straight runs are degenerate
// on a voxel grid — every axis voxel ties in distance-to-wall, which starves
// the distance transform of local maxima — so real runs get a few
// millimetres of lateral wander.
void append_wavy_line(std::vector<Vec3>& pts, const Vec3& from, const Vec3& to, const Vec3& perp,
                      double amplitude, Rng& rng) {
    const double len = (to - from).norm();
    const int waves = std::max(2, static_cast<int>(std::lround(len / 45.0)));
    const double omega = 2.0 * kPi * waves / len;
    // Cap the amplitude so the wave's bend radius 2/(A*omega^2) stays >= 20mm.
    const double a = std::min(amplitude, 0.1 / (omega * omega));
    const double phase_sign = rng.uniform(0.0, 1.0) < 0.5 ? 1.0 : -1.0;
    const int n = std::max(1, static_cast<int>(std::ceil(len / 5.0)));
    for (int k = 1; k <= n; ++k) {
        const double s = static_cast<double>(k) / n;
        const double off = phase_sign * 0.5 * a * (1.0 - std::cos(omega * len * s));
        pts.push_back(from + s * (to - from) + off * perp);
    }
}

// Appends the semicircle from `from` to `to` (interior + end waypoints at
// 7.5° steps), bulging along `axis` with the given sign.
void append_half_turn(std::vector<Vec3>& pts, const Vec3& from, const Vec3& to, int axis,
                      double sign) {
    const Vec3 mid = 0.5 * (from + to);
    const double radius = 0.5 * (to - from).norm();
    Vec3 bulge = Vec3::Zero();
    bulge[axis] = sign;
    const Vec3 along = (to - from).normalized();
    for (int k = 1; k <= 24; ++k) {
        const double phi = kPi * k / 24.0;  // angle from `from` around the turn center
        pts.push_back(mid - std::cos(phi) * radius * along + std::sin(phi) * radius * bulge);
    }
}

// Two stacked serpentine layers: layer A runs along x, layer B along y, with
// centerlines 2r + gap apart in z so the crossings produce sub-voxel surface
// contacts. A 270° helical arc connects the end of layer A to the start of
// layer B while ramping z between the layers; its radius and the serpentine
// pitch both stay above twice the tube radius so the bend-radius constraint
// holds. Layout jitter comes from the seeded rng.
std::vector<Vec3> serpentine_control_points(const PhantomSpec& spec, const Vec3& extent,
                                            Rng& rng) {
    const double r = spec.tube_radius_mm;
    const double m = r + 2.0 * spec.spacing_mm + 5.0;
    const double p = rng.uniform(5.0 * r, 5.4 * r);
    // The layers interpenetrate by a sub-voxel overlap so their masks share a
    // thin voxel layer at the crossings (rendered at wall intensity: a shared
    // wall). A positive surface gap would leave the masks disconnected and
    // make every crossing trivially untraversable.
    const double overlap = rng.uniform(0.5, std::min(1.5, 0.75 * spec.spacing_mm));
    const double sep = 2.0 * r - overlap;
    // Midplane snapped to a voxel plane so the shared layer survives
    // voxelization regardless of the grid dims.
    const double zc = spec.spacing_mm * std::round(0.5 * extent[2] / spec.spacing_mm);
    const double za = zc - 0.5 * sep;
    const double zb = zc + 0.5 * sep;

    // Layer A: three runs along x at y1 < y2 < y3.
    const double x_lo = m + rng.uniform(0.0, 4.0);
    const double x_hi = extent[0] - m - rng.uniform(0.0, 4.0);
    const double xl = x_lo + 0.5 * p;
    const double xh = x_hi - 0.5 * p;
    const double y1 = m + 10.0 + rng.uniform(0.0, 4.0);
    const double y2 = y1 + p;
    const double y3 = y2 + p;

    // Hook arc radius, kept clear of the +x boundary.
    const double rh_hi = std::min(30.0, extent[0] - r - 2.0 - xh);
    const double rh = rng.uniform(std::min(24.0, rh_hi), rh_hi);

    // Layer B: three runs along y at xc1 > xc2 > xc3. The first run starts
    // where the hook arc ends; the others span yl..yh.
    const double xc1 = xh - rh;
    const double xc2 = xc1 - p;
    const double xc3 = xc2 - p;
    const double y_top = y3 + rh;
    const double yh = extent[1] - m - 0.5 * p - rng.uniform(0.0, 4.0);
    const double yl = m + 0.5 * p + 6.0 + rng.uniform(0.0, 4.0);

    std::vector<Vec3> pts;
    pts.push_back({xl, y1, za});
    append_wavy_line(pts, {xl, y1, za}, {xh, y1, za}, Vec3::UnitY(), rng.uniform(2.0, 3.5), rng);
    append_half_turn(pts, {xh, y1, za}, {xh, y2, za}, 0, +1.0);
    append_wavy_line(pts, {xh, y2, za}, {xl, y2, za}, Vec3::UnitY(), rng.uniform(2.0, 3.5), rng);
    append_half_turn(pts, {xl, y2, za}, {xl, y3, za}, 0, -1.0);
    append_wavy_line(pts, {xl, y3, za}, {xh, y3, za}, Vec3::UnitY(), rng.uniform(2.0, 3.5), rng);

    // Hook: 270° counter-clockwise arc in the xy-plane from (xh, y3) heading
    // +x to (xc1, y_top) heading -y, ramping z from za to zb along the way.
    for (int k = 1; k <= 36; ++k) {
        const double phi = 1.5 * kPi * k / 36.0;
        pts.push_back({xh + rh * std::sin(phi), y3 + rh * (1.0 - std::cos(phi)),
                       za + sep * (phi / (1.5 * kPi))});
    }

    append_wavy_line(pts, {xc1, y_top, zb}, {xc1, yl, zb}, Vec3::UnitX(), rng.uniform(2.0, 3.5),
                     rng);
    append_half_turn(pts, {xc1, yl, zb}, {xc2, yl, zb}, 1, -1.0);
    append_wavy_line(pts, {xc2, yl, zb}, {xc2, yh, zb}, Vec3::UnitX(), rng.uniform(2.0, 3.5),
                     rng);
    append_half_turn(pts, {xc2, yh, zb}, {xc3, yh, zb}, 1, +1.0);
    append_wavy_line(pts, {xc3, yh, zb}, {xc3, yl, zb}, Vec3::UnitX(), rng.uniform(2.0, 3.5),
                     rng);
    return pts;
}

struct CenterlineCheck {
    bool ok = true;
    std::string reason;
};

CenterlineCheck check_centerline(const std::vector<Vec3>& pts, const Vec3& extent, double r,
                                 double step) {
    for (const Vec3& p : pts) {
        for (int a = 0; a < 3; ++a) {
            if (p[a] < r || p[a] > extent[a] - r)
                return {false, "centerline is closer than the tube radius to the volume boundary"};
        }
    }
    // Discrete bend radius: circumradius of triplets about 2.5mm apart.
    const int stride = std::max(1, static_cast<int>(std::lround(2.5 / step)));
    double worst = std::numeric_limits<double>::infinity();
    std::size_t worst_at = 0;
    for (std::size_t i = 2 * static_cast<std::size_t>(stride); i < pts.size(); ++i) {
        const Vec3& a = pts[i - 2 * stride];
        const Vec3& b = pts[i - stride];
        const Vec3& c = pts[i];
        const double area2 = (b - a).cross(c - a).norm();
        if (area2 < 1e-12) continue;  // collinear: infinite radius
        const double circum =
            (b - a).norm() * (c - b).norm() * (c - a).norm() / (2.0 * area2);
        if (circum < worst) {
            worst = circum;
            worst_at = i - stride;
        }
    }
    if (worst < 2.0 * r) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "centerline bend radius %.1fmm at (%.0f, %.0f, %.0f) is below twice the "
                      "tube radius (%.1fmm)",
                      worst, pts[worst_at][0], pts[worst_at][1], pts[worst_at][2], 2.0 * r);
        return {false, buf};
    }
    return {};
}

// Bucket grid over centerline segments for distance-to-curve queries.
class SegmentField {
public:
    SegmentField(const std::vector<Vec3>& pts, double cell_mm) : pts_(pts), cell_(cell_mm) {
        cum_.resize(pts.size(), 0.0);
        for (std::size_t i = 1; i < pts.size(); ++i)
            cum_[i] = cum_[i - 1] + (pts[i] - pts[i - 1]).norm();
        Vec3 lo = pts.front(), hi = pts.front();
        for (const Vec3& p : pts) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        origin_ = lo;
        for (int a = 0; a < 3; ++a)
            cells_[a] = std::max(1, static_cast<int>(std::floor((hi[a] - lo[a]) / cell_)) + 1);
        buckets_.assign(static_cast<std::size_t>(cells_[0]) * cells_[1] * cells_[2], {});
        for (std::uint32_t s = 0; s + 1 < pts.size(); ++s) {
            std::array<int, 3> clo, chi;
            for (int a = 0; a < 3; ++a) {
                const double alo = std::min(pts[s][a], pts[s + 1][a]);
                const double ahi = std::max(pts[s][a], pts[s + 1][a]);
                clo[a] = std::clamp(static_cast<int>(std::floor((alo - origin_[a]) / cell_)), 0,
                                    cells_[a] - 1);
                chi[a] = std::clamp(static_cast<int>(std::floor((ahi - origin_[a]) / cell_)), 0,
                                    cells_[a] - 1);
            }
            for (int z = clo[2]; z <= chi[2]; ++z)
                for (int y = clo[1]; y <= chi[1]; ++y)
                    for (int x = clo[0]; x <= chi[0]; ++x)
                        buckets_[index(x, y, z)].push_back(s);
        }
    }

    // Minimum distance from q to the polyline. Exact whenever the result is
    // <= cutoff; larger results only guarantee "farther than cutoff".  When
    // `arc_mm` is non-null it receives the arc-length position of the nearest
    // polyline point (only meaningful when the returned distance is exact).
    double distance(const Vec3& q, double cutoff, double* arc_mm = nullptr) const {
        std::array<int, 3> c0;
        int max_ring = 0;
        for (int a = 0; a < 3; ++a) {
            c0[a] = static_cast<int>(std::floor((q[a] - origin_[a]) / cell_));
            max_ring = std::max(max_ring, std::max(c0[a], cells_[a] - 1 - c0[a]));
        }
        double best = std::numeric_limits<double>::infinity();
        double best_arc = 0.0;
        for (int ring = 0; ring <= max_ring; ++ring) {
            visit_ring(q, c0, ring, best, best_arc);
            const double bound = std::max(0, ring - 2) * cell_;
            if (bound > cutoff && bound > best) break;
        }
        if (arc_mm != nullptr) *arc_mm = best_arc;
        return best;
    }

private:
    std::size_t index(int x, int y, int z) const {
        return (static_cast<std::size_t>(z) * cells_[1] + y) * cells_[0] + x;
    }

    void visit_cell(const Vec3& q, int x, int y, int z, double& best, double& best_arc) const {
        if (x < 0 || y < 0 || z < 0 || x >= cells_[0] || y >= cells_[1] || z >= cells_[2]) return;
        for (std::uint32_t s : buckets_[index(x, y, z)]) {
            const Vec3& a = pts_[s];
            const Vec3 d = pts_[s + 1] - a;
            const double len2 = d.squaredNorm();
            double t = len2 > 0.0 ? (q - a).dot(d) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            const double dist = (q - (a + t * d)).norm();
            if (dist < best) {
                best = dist;
                best_arc = cum_[s] + t * (cum_[s + 1] - cum_[s]);
            }
        }
    }

    void visit_ring(const Vec3& q, const std::array<int, 3>& c0, int ring, double& best,
                    double& best_arc) const {
        if (ring == 0) {
            visit_cell(q, c0[0], c0[1], c0[2], best, best_arc);
            return;
        }
        for (int dz = -ring; dz <= ring; ++dz)
            for (int dy = -ring; dy <= ring; ++dy)
                for (int dx = -ring; dx <= ring; ++dx) {
                    if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != ring) continue;
                    visit_cell(q, c0[0] + dx, c0[1] + dy, c0[2] + dz, best, best_arc);
                }
    }

    const std::vector<Vec3>& pts_;
    double cell_;
    std::vector<double> cum_;
    Vec3 origin_;
    std::array<int, 3> cells_{};
    std::vector<std::vector<std::uint32_t>> buckets_;
};

}  // namespace

PhantomKind phantom_kind_from_string(const std::string& s) {
    if (s == "straight") return PhantomKind::straight;
    if (s == "helix") return PhantomKind::helix;
    if (s == "random_spline") return PhantomKind::random_spline;
    throw TrackError("phantom", "unknown phantom kind: " + s);
}

std::string to_string(PhantomKind k) {
    switch (k) {
        case PhantomKind::straight: return "straight";
        case PhantomKind::helix: return "helix";
        case PhantomKind::random_spline: return "random_spline";
    }
    return "straight";
}

std::vector<Vec3> find_self_contacts(const Curve& dense, double arc_window_mm,
                                     double max_dist_mm, double cluster_radius_mm) {
    std::vector<Vec3> touch_points;
    const double d2 = max_dist_mm * max_dist_mm;
    for (std::size_t i = 0; i < dense.points.size(); ++i) {
        for (std::size_t j = i + 1; j < dense.points.size(); ++j) {
            if (dense.arc[j] - dense.arc[i] <= arc_window_mm) continue;
            if ((dense.points[i] - dense.points[j]).squaredNorm() > d2) continue;
            touch_points.push_back(0.5 * (dense.points[i] + dense.points[j]));
        }
    }

    std::vector<Vec3> centers;
    std::vector<int> counts;
    const double cr2 = cluster_radius_mm * cluster_radius_mm;
    for (const Vec3& p : touch_points) {
        bool placed = false;
        for (std::size_t c = 0; c < centers.size(); ++c) {
            if ((centers[c] - p).squaredNorm() <= cr2) {
                centers[c] = (centers[c] * counts[c] + p) / (counts[c] + 1);
                ++counts[c];
                placed = true;
                break;
            }
        }
        if (!placed) {
            centers.push_back(p);
            counts.push_back(1);
        }
    }
    return centers;
}

namespace {

// Smooth lattice value noise in [-1, 1]: hashed corner values blended with
// smoothstep weights, so the field varies gently at the unit-cell scale
// instead of jumping voxel to voxel.
double value_noise(const Vec3& p, std::uint64_t seed) {
    const double fx = std::floor(p.x());
    const double fy = std::floor(p.y());
    const double fz = std::floor(p.z());
    const auto corner = [&](int dx, int dy, int dz) {
        const auto fold = [](double f, int d) {
            return static_cast<std::uint64_t>(static_cast<std::int64_t>(f) + d + 4096);
        };
        const std::uint64_t key =
            fold(fx, dx) + 8192ull * (fold(fy, dy) + 8192ull * fold(fz, dz));
        const std::uint64_t h = hash_counter(seed, key);
        return static_cast<double>(h >> 11) * (2.0 / 9007199254740992.0) - 1.0;
    };
    const auto smooth = [](double t) { return t * t * (3.0 - 2.0 * t); };
    const double tx = smooth(p.x() - fx);
    const double ty = smooth(p.y() - fy);
    const double tz = smooth(p.z() - fz);
    double blend = 0.0;
    for (int dz = 0; dz < 2; ++dz)
        for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) {
                const double wx = dx ? tx : 1.0 - tx;
                const double wy = dy ? ty : 1.0 - ty;
                const double wz = dz ? tz : 1.0 - tz;
                blend += wx * wy * wz * corner(dx, dy, dz);
            }
    return blend;
}

}  // namespace

PhantomResult generate_phantom(const PhantomSpec& spec, int threads) {
    if (spec.wall_thickness_mm <= 0.0 || spec.tube_radius_mm <= spec.wall_thickness_mm)
        throw TrackError("phantom", "tube radius must exceed wall thickness, both positive");
    if (spec.spacing_mm <= 0.0) throw TrackError("phantom", "spacing must be positive");
    for (int d : spec.dims)
        if (d < 4) throw TrackError("phantom", "volume dims must be at least 4 voxels");

    const double r = spec.tube_radius_mm;
    const double w = spec.wall_thickness_mm;
    const double step = 0.5 * spec.spacing_mm;
    const Vec3 extent(spec.dims[0] * spec.spacing_mm, spec.dims[1] * spec.spacing_mm,
                      spec.dims[2] * spec.spacing_mm);
    const double contact_dist = 2.0 * r + spec.spacing_mm;
    const double arc_window = 3.0 * r;

    const bool retryable = spec.control_points.empty() && spec.kind == PhantomKind::random_spline;
    const int attempts = retryable ? std::max(1, spec.max_retries) : 1;

    std::vector<Vec3> dense;
    std::vector<Vec3> contacts;
    std::string last_reason = "no attempt made";
    bool ok = false;
    for (int attempt = 0; attempt < attempts && !ok; ++attempt) {
        if (!spec.control_points.empty()) {
            dense = sample_spline(spec.control_points, step);
        } else if (spec.kind == PhantomKind::straight) {
            dense = straight_centerline(spec, extent, step);
        } else if (spec.kind == PhantomKind::helix) {
            dense = helix_centerline(spec, extent, step);
        } else {
            Rng rng(hash_counter(spec.seed, static_cast<std::uint64_t>(attempt)));
            dense = sample_spline(serpentine_control_points(spec, extent, rng), step);
        }

        const CenterlineCheck check = check_centerline(dense, extent, r, step);
        if (!check.ok) {
            last_reason = check.reason;
            continue;
        }

        Curve curve = make_curve(dense);
        contacts = find_self_contacts(curve, arc_window, contact_dist, 3.0 * r);
        if (retryable && static_cast<int>(contacts.size()) < spec.target_contacts) {
            last_reason = "generated centerline has too few self-contact regions";
            continue;
        }
        ok = true;
    }
    if (!ok) throw TrackError("phantom", "could not generate a valid centerline: " + last_reason);

    PhantomResult res;
    res.gt_path = make_curve(dense);
    res.start_mm = res.gt_path.points.front();
    res.end_mm = res.gt_path.points.back();
    res.contact_centers_mm = contacts;

    res.volume.dims = spec.dims;
    res.volume.spacing = Vec3::Constant(spec.spacing_mm);
    res.volume.origin = Vec3::Zero();
    res.volume.data.assign(res.volume.size(), 0.0f);
    res.segmentation.dims = spec.dims;
    res.segmentation.spacing = res.volume.spacing;
    res.segmentation.origin = res.volume.origin;
    res.segmentation.data.assign(res.segmentation.size(), 0);

    const SegmentField field(dense, 8.0);
    const double fade = std::clamp(spec.contact_wall_fade, 0.0, 1.0);
    const double fade_r = spec.contact_fade_radius_mm;
    const double bump = std::max(0.0, spec.radius_bump_mm);
    const double bump_period = std::max(1.0, spec.radius_bump_period_mm);

    parallel_for(res.volume.size(), [&](std::size_t i) {
        const auto [x, y, z] = res.volume.coords(i);
        const Vec3 q = res.volume.voxel_center_mm(x, y, z);
        double arc = 0.0;
        const double rho = field.distance(q, r + bump, &arc);
        // Periodic caliber variation guarantees interior distance-map maxima
        // at regular arc intervals, the way a real lumen's width fluctuates.
        const double reff =
            bump > 0.0 ? r + bump * 0.5 * (1.0 + std::cos(2.0 * kPi * arc / bump_period)) : r;

        double intensity;
        if (rho < reff - w) {
            intensity = spec.lumen_intensity;
            // Heterogeneous lumen content: without it the interior is
            // featureless and path costs stop growing with travelled length.
            if (spec.lumen_texture_amplitude > 0.0) {
                const double s = std::max(1e-6, spec.lumen_texture_scale_mm);
                intensity += spec.lumen_texture_amplitude *
                             value_noise(q / s, spec.seed ^ 0x51ed270b4f5f1e6full);
            }
        } else if (rho <= reff) {
            intensity = spec.wall_intensity;
            if (fade > 0.0 && fade_r > 0.0) {
                double factor = 0.0;
                for (const Vec3& c : contacts) {
                    const double dc = (q - c).norm();
                    factor = std::max(factor, 1.0 - dc / fade_r);
                }
                factor = std::clamp(factor, 0.0, 1.0);
                intensity += (spec.lumen_intensity - spec.wall_intensity) * fade * factor;
            }
        } else {
            intensity = spec.background_intensity;
        }
        if (spec.noise_sigma > 0.0) {
            Rng noise(hash_counter(spec.seed ^ 0x9e3779b97f4a7c15ull, i));
            intensity += spec.noise_sigma * noise.normal();
        }
        res.volume.data[i] = static_cast<float>(intensity);
        res.segmentation.data[i] = rho <= reff ? 1 : 0;
    }, threads);

    return res;
}

}  // namespace tubetrack
