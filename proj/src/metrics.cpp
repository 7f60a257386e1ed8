#include "tubetrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tubetrack {

PointGrid::PointGrid(const std::vector<Vec3>& points, double cell_mm)
    : points_(points), cell_(cell_mm) {
    if (points.empty()) throw TrackError("metrics", "point grid needs at least one point");
    if (cell_ <= 0.0) throw TrackError("metrics", "point grid cell size must be positive");

    Vec3 lo = points.front(), hi = points.front();
    for (const Vec3& p : points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    origin_ = lo;
    for (int a = 0; a < 3; ++a) {
        cells_[a] = static_cast<int>(std::floor((hi[a] - lo[a]) / cell_)) + 1;
        cells_[a] = std::max(cells_[a], 1);
    }
    buckets_.assign(static_cast<std::size_t>(cells_[0]) * cells_[1] * cells_[2], {});
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::array<int, 3> c;
        for (int a = 0; a < 3; ++a) {
            c[a] = static_cast<int>(std::floor((points[i][a] - origin_[a]) / cell_));
            c[a] = std::clamp(c[a], 0, cells_[a] - 1);
        }
        buckets_[bucket_index(c[0], c[1], c[2])].push_back(static_cast<std::uint32_t>(i));
    }
}

std::pair<std::size_t, double> PointGrid::nearest(const Vec3& q) const {
    std::array<int, 3> c0;
    int max_ring = 0;
    for (int a = 0; a < 3; ++a) {
        c0[a] = static_cast<int>(std::floor((q[a] - origin_[a]) / cell_));
        max_ring = std::max(max_ring, std::max(c0[a], cells_[a] - 1 - c0[a]));
    }

    double best_d2 = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    auto consider_cell = [&](int cx, int cy, int cz) {
        if (cx < 0 || cy < 0 || cz < 0 || cx >= cells_[0] || cy >= cells_[1] || cz >= cells_[2])
            return;
        for (std::uint32_t i : buckets_[bucket_index(cx, cy, cz)]) {
            const double d2 = (points_[i] - q).squaredNorm();
            if (d2 < best_d2 || (d2 == best_d2 && i < best_i)) {
                best_d2 = d2;
                best_i = i;
            }
        }
    };

    for (int r = 0; r <= max_ring; ++r) {
        if (r == 0) {
            consider_cell(c0[0], c0[1], c0[2]);
        } else {
            for (int dz = -r; dz <= r; ++dz) {
                for (int dy = -r; dy <= r; ++dy) {
                    for (int dx = -r; dx <= r; ++dx) {
                        if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != r) continue;
                        consider_cell(c0[0] + dx, c0[1] + dy, c0[2] + dz);
                    }
                }
            }
        }
        // Unvisited cells lie in rings > r, at least (r - 2) cells away even
        // after allowing one cell of floor-rounding slack on each side.
        const double bound = std::max(0, r - 2) * cell_;
        if (std::isfinite(best_d2) && bound * bound > best_d2) break;
    }
    return {best_i, std::sqrt(best_d2)};
}

double directed_mean_distance(const Curve& from, const Curve& to) {
    const PointGrid grid(to.points);
    double sum = 0.0;
    for (const Vec3& p : from.points) sum += grid.nearest(p).second;
    return sum / static_cast<double>(from.points.size());
}

CurveDistance curve_to_curve_distance(const Curve& pred, const Curve& gt) {
    CurveDistance d;
    d.pred_to_gt_mm = directed_mean_distance(pred, gt);
    d.gt_to_pred_mm = directed_mean_distance(gt, pred);
    d.c2c_mm = 0.5 * (d.pred_to_gt_mm + d.gt_to_pred_mm);
    return d;
}

namespace {

// Largest arc-coordinate span over error-free runs of the mapped sequence.
double best_span(const std::vector<double>& coord, const std::vector<bool>& bad,
                 double jump_tol) {
    double best = 0.0;
    bool open = false;
    double lo = 0.0, hi = 0.0, prev = 0.0;
    for (std::size_t i = 0; i < coord.size(); ++i) {
        if (bad[i]) {
            open = false;
            continue;
        }
        if (open && std::abs(coord[i] - prev) > jump_tol) open = false;
        if (!open) {
            open = true;
            lo = hi = coord[i];
        } else {
            lo = std::min(lo, coord[i]);
            hi = std::max(hi, coord[i]);
        }
        prev = coord[i];
        best = std::max(best, hi - lo);
    }
    return best;
}

}  // namespace

double max_length_without_error(const Curve& pred, const Curve& gt, double jump_tol_mm,
                                double dist_tol_mm) {
    const PointGrid grid(gt.points);
    const std::size_t n = pred.points.size();
    std::vector<double> coord(n);
    std::vector<bool> bad(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto [j, d] = grid.nearest(pred.points[i]);
        coord[i] = gt.arc[j];
        bad[i] = d > dist_tol_mm;
    }

    const double forward = best_span(coord, bad, jump_tol_mm);
    std::reverse(coord.begin(), coord.end());
    std::reverse(bad.begin(), bad.end());
    const double backward = best_span(coord, bad, jump_tol_mm);
    return std::max(forward, backward);
}

MetricsReport evaluate_curves(const Curve& pred, const Curve& gt, const MetricsParams& params) {
    const Curve rp = resample_uniform(pred, params.resample_step_mm);
    const Curve rg = resample_uniform(gt, params.resample_step_mm);

    MetricsReport report;
    report.params = params;
    const CurveDistance d = curve_to_curve_distance(rp, rg);
    report.c2c_mm = d.c2c_mm;
    report.pred_to_gt_mm = d.pred_to_gt_mm;
    report.gt_to_pred_mm = d.gt_to_pred_mm;
    report.max_len_no_error_mm =
        max_length_without_error(rp, rg, params.jump_tol_mm, params.dist_tol_mm);
    return report;
}

}  // namespace tubetrack
