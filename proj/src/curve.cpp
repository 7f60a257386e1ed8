#include "tubetrack/curve.hpp"

#include <cmath>

namespace tubetrack {

Curve make_curve(std::vector<Vec3> points) {
    if (points.size() < 2) throw TrackError("curve", "a curve needs at least two points");
    Curve c;
    c.points = std::move(points);
    c.arc.resize(c.points.size());
    c.arc[0] = 0.0;
    for (std::size_t i = 1; i < c.points.size(); ++i)
        c.arc[i] = c.arc[i - 1] + (c.points[i] - c.points[i - 1]).norm();
    return c;
}

Curve resample_uniform(const Curve& c, double step_mm) {
    if (c.points.size() < 2) throw TrackError("curve", "a curve needs at least two points");
    if (step_mm <= 0.0) throw TrackError("curve", "resample step must be positive");

    const double total = c.arc.back();
    std::vector<Vec3> pts;
    if (total <= 0.0) {
        pts = {c.points.front(), c.points.back()};
        return make_curve(std::move(pts));
    }

    const auto steps = static_cast<std::size_t>(std::floor(total / step_mm));
    pts.reserve(steps + 2);
    std::size_t seg = 0;
    for (std::size_t k = 0; k <= steps; ++k) {
        const double s = static_cast<double>(k) * step_mm;
        while (seg + 2 < c.points.size() && c.arc[seg + 1] < s) ++seg;
        const double len = c.arc[seg + 1] - c.arc[seg];
        if (len <= 0.0) {
            pts.push_back(c.points[seg]);
            continue;
        }
        const double t = (s - c.arc[seg]) / len;
        pts.push_back(c.points[seg] + t * (c.points[seg + 1] - c.points[seg]));
    }
    if (total - static_cast<double>(steps) * step_mm > 1e-9) pts.push_back(c.points.back());
    if (pts.size() < 2) pts.push_back(c.points.back());
    return make_curve(std::move(pts));
}

}  // namespace tubetrack
