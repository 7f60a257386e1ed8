#pragma once

#include <string>
#include <vector>

#include "tubetrack/curve.hpp"
#include "tubetrack/cylinders.hpp"
#include "tubetrack/sampling.hpp"
#include "tubetrack/tsp.hpp"

namespace tubetrack {

/// path.csv: header x_mm,y_mm,z_mm,node_id; one row per path node.
void write_path_csv(const TrackedPath& path, const std::string& file);

/// Legacy ASCII VTK PolyData with a single polyline, for 3D viewers.
void write_path_vtk(const TrackedPath& path, const std::string& file);

/// peaks.csv: header x_mm,y_mm,z_mm,distance_mm,supervoxel_id.
void write_peaks_csv(const MustPassNodeSet& mp, const std::string& file);

/// cylinders.csv: header cx,cy,cz,ax,ay,az,radius_mm,height_mm,inliers,valid.
void write_cylinders_csv(const std::vector<Cylinder>& cylinders, const std::string& file);

/// Wavefront OBJ tube meshes for the valid cylinders (invalid ones skipped).
void write_cylinders_obj(const std::vector<Cylinder>& cylinders, const std::string& file,
                         int sides = 24);

/// curve CSV: header x_mm,y_mm,z_mm; one row per point.
void write_curve_csv(const Curve& curve, const std::string& file);

/// Reads a curve from CSV. A non-numeric first line is treated as a header;
/// rows may carry extra columns (only the first three are used).
Curve read_curve_csv(const std::string& file);

}  // namespace tubetrack
