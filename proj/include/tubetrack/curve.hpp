#pragma once

#include <vector>

#include "tubetrack/volume.hpp"

namespace tubetrack {

/// Ordered 3D polyline in mm with per-point cumulative arc length.
struct Curve {
    std::vector<Vec3> points;
    std::vector<double> arc;  // arc[0] == 0, non-decreasing

    double length_mm() const { return arc.empty() ? 0.0 : arc.back(); }
};

/// Builds a curve from ≥ 2 points, computing cumulative arc length.
Curve make_curve(std::vector<Vec3> points);

/// Resamples to uniform spacing: points at arc positions 0, step, 2·step, …;
/// the original endpoint is appended when it is not hit exactly.
Curve resample_uniform(const Curve& c, double step_mm = 1.0);

}  // namespace tubetrack
