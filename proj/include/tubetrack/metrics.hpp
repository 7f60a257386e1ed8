#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "tubetrack/curve.hpp"

namespace tubetrack {

/// Uniform bucket grid for exact nearest-point queries over a fixed point
/// set. Ties in distance resolve to the smallest point index.
class PointGrid {
public:
    explicit PointGrid(const std::vector<Vec3>& points, double cell_mm = 4.0);

    /// Returns (index, distance). The search is exhaustive in effect: ring
    /// expansion stops only when every unvisited cell is provably farther
    /// than the best match (with slack for boundary rounding).
    std::pair<std::size_t, double> nearest(const Vec3& q) const;

private:
    const std::vector<Vec3>& points_;
    double cell_;
    Vec3 origin_;
    std::array<int, 3> cells_{};
    std::vector<std::vector<std::uint32_t>> buckets_;

    std::size_t bucket_index(int cx, int cy, int cz) const {
        return (static_cast<std::size_t>(cz) * cells_[1] + cy) * cells_[0] + cx;
    }
};

struct CurveDistance {
    double pred_to_gt_mm = 0.0;
    double gt_to_pred_mm = 0.0;
    double c2c_mm = 0.0;
};

/// Mean over `from` points of the distance to the nearest `to` point.
double directed_mean_distance(const Curve& from, const Curve& to);

/// Symmetric curve-to-curve distance: mean of the two directed means.
/// Inputs are expected to be resampled to uniform spacing already.
CurveDistance curve_to_curve_distance(const Curve& pred, const Curve& gt);

/// Longest ground-truth arc-length span tracked without an error. Each
/// predicted point maps to the arc coordinate of its nearest GT point; a
/// point farther than dist_tol_mm from GT is an error, as is an arc jump
/// greater than jump_tol_mm between consecutive predicted points. The
/// result is the largest (max − min) mapped-coordinate span over error-free
/// runs, maximized over both traversal orientations of pred. Inputs are
/// expected to be resampled to uniform spacing already.
double max_length_without_error(const Curve& pred, const Curve& gt, double jump_tol_mm,
                                double dist_tol_mm);

struct MetricsParams {
    double resample_step_mm = 1.0;
    double jump_tol_mm = 20.0;
    double dist_tol_mm = 10.0;
};

struct MetricsReport {
    double c2c_mm = 0.0;
    double pred_to_gt_mm = 0.0;
    double gt_to_pred_mm = 0.0;
    double max_len_no_error_mm = 0.0;
    MetricsParams params;
};

/// Resamples both curves to params.resample_step_mm and computes all metrics.
MetricsReport evaluate_curves(const Curve& pred, const Curve& gt, const MetricsParams& params);

}  // namespace tubetrack
