#include "tubetrack/exports.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tubetrack {

namespace {

std::ofstream open_out(const std::string& file, const char* stage) {
    std::ofstream out(file);
    if (!out) throw TrackError(stage, "cannot open for writing: " + file);
    return out;
}

void finish_out(std::ofstream& out, const std::string& file, const char* stage) {
    out.flush();
    if (!out) throw TrackError(stage, "failed writing: " + file);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

void write_path_csv(const TrackedPath& path, const std::string& file) {
    auto out = open_out(file, "export");
    out << "x_mm,y_mm,z_mm,node_id\n";
    for (std::size_t i = 0; i < path.nodes.size(); ++i) {
        const Vec3& p = path.polyline_mm[i];
        out << fmt(p[0]) << ',' << fmt(p[1]) << ',' << fmt(p[2]) << ',' << path.nodes[i] << '\n';
    }
    finish_out(out, file, "export");
}

void write_path_vtk(const TrackedPath& path, const std::string& file) {
    auto out = open_out(file, "export");
    const std::size_t n = path.polyline_mm.size();
    out << "# vtk DataFile Version 3.0\ntracked path\nASCII\nDATASET POLYDATA\n";
    out << "POINTS " << n << " float\n";
    for (const Vec3& p : path.polyline_mm)
        out << fmt(p[0]) << ' ' << fmt(p[1]) << ' ' << fmt(p[2]) << '\n';
    out << "LINES 1 " << (n + 1) << '\n';
    out << n;
    for (std::size_t i = 0; i < n; ++i) out << ' ' << i;
    out << '\n';
    finish_out(out, file, "export");
}

void write_peaks_csv(const MustPassNodeSet& mp, const std::string& file) {
    auto out = open_out(file, "export");
    out << "x_mm,y_mm,z_mm,distance_mm,supervoxel_id\n";
    for (const Peak& p : mp.peaks) {
        out << fmt(p.position_mm[0]) << ',' << fmt(p.position_mm[1]) << ','
            << fmt(p.position_mm[2]) << ',' << fmt(p.value) << ',' << p.node << '\n';
    }
    finish_out(out, file, "export");
}

void write_cylinders_csv(const std::vector<Cylinder>& cylinders, const std::string& file) {
    auto out = open_out(file, "export");
    out << "cx,cy,cz,ax,ay,az,radius_mm,height_mm,inliers,valid\n";
    for (const Cylinder& c : cylinders) {
        out << fmt(c.center[0]) << ',' << fmt(c.center[1]) << ',' << fmt(c.center[2]) << ','
            << fmt(c.axis[0]) << ',' << fmt(c.axis[1]) << ',' << fmt(c.axis[2]) << ','
            << fmt(c.radius_mm) << ',' << fmt(c.height_mm) << ',' << c.inlier_count << ','
            << (c.valid ? 1 : 0) << '\n';
    }
    finish_out(out, file, "export");
}

void write_cylinders_obj(const std::vector<Cylinder>& cylinders, const std::string& file,
                         int sides) {
    auto out = open_out(file, "export");
    out << "# cylinder fits\n";
    long base = 1;  // OBJ vertex indices are 1-based
    int mesh_id = 0;
    for (const Cylinder& c : cylinders) {
        if (!c.valid) continue;
        out << "o cylinder_" << mesh_id++ << '\n';

        // Build an orthonormal frame around the axis.
        Vec3 u = c.axis.cross(Vec3::UnitX());
        if (u.norm() < 1e-6) u = c.axis.cross(Vec3::UnitY());
        u.normalize();
        const Vec3 v = c.axis.cross(u).normalized();

        const double h = 0.5 * c.height_mm;
        for (int ring = 0; ring < 2; ++ring) {
            const Vec3 center = c.center + (ring == 0 ? -h : h) * c.axis;
            for (int s = 0; s < sides; ++s) {
                const double ang = 2.0 * 3.14159265358979323846 * s / sides;
                const Vec3 p = center + c.radius_mm * (std::cos(ang) * u + std::sin(ang) * v);
                out << "v " << fmt(p[0]) << ' ' << fmt(p[1]) << ' ' << fmt(p[2]) << '\n';
            }
        }
        for (int s = 0; s < sides; ++s) {
            const long a = base + s;
            const long b = base + (s + 1) % sides;
            const long a2 = a + sides;
            const long b2 = b + sides;
            out << "f " << a << ' ' << b << ' ' << b2 << ' ' << a2 << '\n';
        }
        base += 2 * sides;
    }
    finish_out(out, file, "export");
}

void write_curve_csv(const Curve& curve, const std::string& file) {
    auto out = open_out(file, "export");
    out << "x_mm,y_mm,z_mm\n";
    for (const Vec3& p : curve.points)
        out << fmt(p[0]) << ',' << fmt(p[1]) << ',' << fmt(p[2]) << '\n';
    finish_out(out, file, "export");
}

Curve read_curve_csv(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw TrackError("export", "cannot open curve CSV: " + file);

    std::vector<Vec3> pts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::istringstream ss(line);
        std::string field;
        Vec3 p;
        bool bad = false;
        for (int k = 0; k < 3; ++k) {
            if (!std::getline(ss, field, ',')) {
                bad = true;
                break;
            }
            try {
                std::size_t pos = 0;
                p[k] = std::stod(field, &pos);
                while (pos < field.size() && std::isspace(static_cast<unsigned char>(field[pos])))
                    ++pos;
                if (pos != field.size()) bad = true;
            } catch (const std::exception&) {
                bad = true;
            }
            if (bad) break;
        }
        if (bad) {
            if (lineno == 1) continue;  // header row
            throw TrackError("export",
                             "malformed curve CSV row " + std::to_string(lineno) + " in " + file);
        }
        pts.push_back(p);
    }
    if (pts.size() < 2)
        throw TrackError("export", "curve CSV needs at least two points: " + file);
    return make_curve(std::move(pts));
}

}  // namespace tubetrack
