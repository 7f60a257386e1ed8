#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tubetrack/metrics.hpp"

namespace tubetrack {

enum class TrackMode { sp, tsp, tsp_cyl };

TrackMode track_mode_from_string(const std::string& s);
std::string to_string(TrackMode m);

/// All pipeline parameters, grouped by the stage that consumes them. The
/// JSON layout mirrors the grouping: one object per stage plus a top-level
/// "run" object for seed/threads/mode.
struct PipelineConfig {
    // volume
    double spacing_mm = 2.0;

    // filters
    std::vector<double> scales_mm{2.0, 3.0, 4.0};
    bool dark_sheets = true;
    double binarize_threshold = 0.5;

    // supervoxel
    double sv_volume_mm3 = 216.0;
    double compactness = 0.01;
    int sv_iterations = 10;

    // graph
    double lambda = 1.0;

    // sampling
    double theta_v_mm = 3.0;
    double theta_d_mm = 6.0;

    // cylinders
    double patch_mm = 36.0;
    double cyl_height_mm = 18.0;
    int ransac_iterations = 50000;
    double inlier_tol_mm = 1.0;
    double min_radius_mm = 7.04;
    double max_radius_mm = 15.28;
    int min_support = 30;

    // tsp
    double delta_mm = 50.0;

    // metrics
    MetricsParams metrics;

    // run
    std::uint64_t seed = 0;
    int threads = 0;
    TrackMode mode = TrackMode::tsp_cyl;

    void validate() const;  // throws TrackError on out-of-range values
};

PipelineConfig load_config(const std::string& path);
PipelineConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const PipelineConfig& cfg);
void save_config(const PipelineConfig& cfg, const std::string& path);

}  // namespace tubetrack
