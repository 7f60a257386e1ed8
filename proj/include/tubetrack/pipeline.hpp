#pragma once

#include <string>

#include "tubetrack/config.hpp"
#include "tubetrack/curve.hpp"
#include "tubetrack/cylinders.hpp"
#include "tubetrack/rag.hpp"
#include "tubetrack/sampling.hpp"
#include "tubetrack/supervoxel.hpp"
#include "tubetrack/tsp.hpp"
#include "tubetrack/volume.hpp"

namespace tubetrack {

struct TrackResult {
    TrackedPath path;
    Curve path_curve;  // the path polyline as a curve (for metrics/export)
    SupervoxelLabeling labeling;
    RegionAdjacencyGraph rag;
    MustPassNodeSet must_pass;
    std::vector<Cylinder> cylinders;
    int start_node = 0;
    int end_node = 0;
    int valid_cylinders = 0;
};

/// Runs the full tracking pipeline on a volume + segmentation pair:
/// wall filtering, supervoxels, adjacency graph with edge costs, must-pass
/// sampling, local cylinder fits, open-tour ordering, and path stitching.
/// cfg.mode selects the variant: sp (plain shortest path, no must-pass
/// nodes), tsp (must-pass nodes, lambda forced to 0), tsp+cyl (full).
/// Inputs are resampled to isotropic cfg.spacing_mm when needed; start/end
/// are snapped to the supervoxels containing them. Stage timings and
/// summaries go to stderr.
TrackResult run_track(const Volume& volume, const VoxelMask& segmentation, const Vec3& start_mm,
                      const Vec3& end_mm, const PipelineConfig& cfg);

/// Writes the artifact set under out_dir (created if missing): path.csv,
/// path.vtk, peaks.csv, cylinders.csv, cylinders.obj, report.json,
/// effective_config.json, and optionally graph_edges.txt. All artifacts are
/// byte-reproducible for a fixed config and seed.
void write_track_artifacts(const TrackResult& result, const PipelineConfig& cfg,
                           const std::string& out_dir, bool graph_edges);

}  // namespace tubetrack
