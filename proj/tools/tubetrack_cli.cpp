#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tubetrack/exports.hpp"
#include "tubetrack/phantom.hpp"
#include "tubetrack/pipeline.hpp"

namespace tt = tubetrack;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

tt::Vec3 parse_point(const std::string& text, const std::string& what) {
    tt::Vec3 p;
    char extra;
    if (std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &p[0], &p[1], &p[2], &extra) != 3)
        throw tt::TrackError("cli", what + " must be given as x,y,z in mm, got: " + text);
    return p;
}

std::string fmt_mm(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

struct TrackArgs {
    std::string volume, seg, start, end, out_dir;
    std::string config_file, mode;
    double crop_zmin = 0.0, crop_zmax = 0.0;
    bool crop = false;
    bool graph_edges = false;
    // flag overrides; negative sentinel = not given
    double spacing = -1.0, lambda = -1.0, delta = -1.0;
    int threads = -1, ransac_iters = -1;
    long long seed = -1;
};

int run_track_cmd(const TrackArgs& a) {
    tt::PipelineConfig cfg;
    if (!a.config_file.empty()) cfg = tt::load_config(a.config_file);
    if (!a.mode.empty()) cfg.mode = tt::track_mode_from_string(a.mode);
    if (a.spacing > 0.0) cfg.spacing_mm = a.spacing;
    if (a.lambda >= 0.0) cfg.lambda = a.lambda;
    if (a.delta > 0.0) cfg.delta_mm = a.delta;
    if (a.threads >= 0) cfg.threads = a.threads;
    if (a.ransac_iters > 0) cfg.ransac_iterations = a.ransac_iters;
    if (a.seed >= 0) cfg.seed = static_cast<std::uint64_t>(a.seed);
    cfg.validate();

    tt::Volume volume = tt::load_volume(a.volume);
    tt::VoxelMask seg = tt::load_mask(a.seg);
    if (a.crop) {
        volume = tt::crop_z(volume, a.crop_zmin, a.crop_zmax);
        tt::Volume segf;
        static_cast<tt::Grid&>(segf) = seg;
        segf.data.assign(seg.data.begin(), seg.data.end());
        segf = tt::crop_z(segf, a.crop_zmin, a.crop_zmax);
        tt::VoxelMask cropped(segf);
        for (std::size_t i = 0; i < segf.data.size(); ++i)
            cropped.data[i] = segf.data[i] >= 0.5f ? 1 : 0;
        seg = cropped;
    }

    const tt::Vec3 start = parse_point(a.start, "--start");
    const tt::Vec3 end = parse_point(a.end, "--end");

    const tt::TrackResult result = tt::run_track(volume, seg, start, end, cfg);
    tt::write_track_artifacts(result, cfg, a.out_dir, a.graph_edges);

    std::printf("mode %s: %zu path nodes, length %s mm, cost %.6g\n",
                tt::to_string(cfg.mode).c_str(), result.path.nodes.size(),
                fmt_mm(result.path_curve.length_mm()).c_str(), result.path.total_cost);
    std::printf("artifacts written to %s\n", a.out_dir.c_str());
    return 0;
}

int run_eval_cmd(const std::string& pred_file, const std::string& gt_file,
                 const std::string& config_file, const std::string& report_file) {
    tt::PipelineConfig cfg;
    if (!config_file.empty()) cfg = tt::load_config(config_file);

    const tt::Curve pred = tt::read_curve_csv(pred_file);
    const tt::Curve gt = tt::read_curve_csv(gt_file);
    const tt::MetricsReport r = tt::evaluate_curves(pred, gt, cfg.metrics);

    json out;
    out["c2c_mm"] = r.c2c_mm;
    out["pred_to_gt_mm"] = r.pred_to_gt_mm;
    out["gt_to_pred_mm"] = r.gt_to_pred_mm;
    out["max_len_no_error_mm"] = r.max_len_no_error_mm;
    out["params"] = {{"resample_step_mm", r.params.resample_step_mm},
                     {"jump_tol_mm", r.params.jump_tol_mm},
                     {"dist_tol_mm", r.params.dist_tol_mm}};
    if (!report_file.empty()) {
        std::ofstream f(report_file);
        if (!f) throw tt::TrackError("cli", "cannot write report: " + report_file);
        f << out.dump(2) << "\n";
    }

    std::printf("%-22s %10s\n", "metric", "value");
    std::printf("%-22s %10s\n", "c2c_mm", fmt_mm(r.c2c_mm).c_str());
    std::printf("%-22s %10s\n", "pred_to_gt_mm", fmt_mm(r.pred_to_gt_mm).c_str());
    std::printf("%-22s %10s\n", "gt_to_pred_mm", fmt_mm(r.gt_to_pred_mm).c_str());
    std::printf("%-22s %10s\n", "max_len_no_error_mm", fmt_mm(r.max_len_no_error_mm).c_str());
    return 0;
}

tt::PhantomSpec phantom_spec_from_json(const json& j) {
    tt::PhantomSpec spec;
    auto get = [&](const char* key, auto& target) {
        if (j.contains(key)) target = j.at(key).get<std::decay_t<decltype(target)>>();
    };
    if (j.contains("dims")) {
        const auto d = j.at("dims").get<std::vector<int>>();
        if (d.size() != 3) throw tt::TrackError("phantom", "dims must have three entries");
        spec.dims = {d[0], d[1], d[2]};
    }
    get("spacing_mm", spec.spacing_mm);
    if (j.contains("kind")) spec.kind = tt::phantom_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("control_points")) {
        for (const auto& row : j.at("control_points")) {
            const auto p = row.get<std::vector<double>>();
            if (p.size() != 3)
                throw tt::TrackError("phantom", "control points must have three coordinates");
            spec.control_points.push_back({p[0], p[1], p[2]});
        }
    }
    get("tube_radius_mm", spec.tube_radius_mm);
    get("wall_thickness_mm", spec.wall_thickness_mm);
    get("lumen_intensity", spec.lumen_intensity);
    get("wall_intensity", spec.wall_intensity);
    get("background_intensity", spec.background_intensity);
    get("noise_sigma", spec.noise_sigma);
    get("seed", spec.seed);
    get("straight_length_mm", spec.straight_length_mm);
    get("helix_radius_mm", spec.helix_radius_mm);
    get("helix_pitch_mm", spec.helix_pitch_mm);
    get("helix_turns", spec.helix_turns);
    get("target_contacts", spec.target_contacts);
    get("max_retries", spec.max_retries);
    get("contact_wall_fade", spec.contact_wall_fade);
    get("contact_fade_radius_mm", spec.contact_fade_radius_mm);
    get("radius_bump_mm", spec.radius_bump_mm);
    get("radius_bump_period_mm", spec.radius_bump_period_mm);
    get("lumen_texture_amplitude", spec.lumen_texture_amplitude);
    get("lumen_texture_scale_mm", spec.lumen_texture_scale_mm);
    return spec;
}

int run_phantom_cmd(const std::string& spec_file, const std::string& out_dir,
                    const std::string& kind, long long seed, int threads) {
    json j = json::object();
    if (!spec_file.empty()) {
        std::ifstream in(spec_file);
        if (!in) throw tt::TrackError("cli", "cannot open phantom spec: " + spec_file);
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw tt::TrackError("phantom", std::string("invalid spec JSON: ") + e.what());
        }
    }
    tt::PhantomSpec spec = phantom_spec_from_json(j);
    if (!kind.empty()) spec.kind = tt::phantom_kind_from_string(kind);
    if (seed >= 0) spec.seed = static_cast<std::uint64_t>(seed);

    const tt::PhantomResult res = tt::generate_phantom(spec, threads);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw tt::TrackError("cli", "cannot create output directory: " + out_dir);
    const auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

    tt::save_volume(res.volume, path("volume.nii.gz"));
    tt::save_mask(res.segmentation, path("segmentation.nii.gz"));
    tt::write_curve_csv(res.gt_path, path("gt_path.csv"));

    json manifest;
    manifest["kind"] = tt::to_string(spec.kind);
    manifest["dims"] = {spec.dims[0], spec.dims[1], spec.dims[2]};
    manifest["spacing_mm"] = spec.spacing_mm;
    manifest["tube_radius_mm"] = spec.tube_radius_mm;
    manifest["wall_thickness_mm"] = spec.wall_thickness_mm;
    manifest["lumen_intensity"] = spec.lumen_intensity;
    manifest["wall_intensity"] = spec.wall_intensity;
    manifest["background_intensity"] = spec.background_intensity;
    manifest["noise_sigma"] = spec.noise_sigma;
    manifest["seed"] = spec.seed;
    manifest["contact_wall_fade"] = spec.contact_wall_fade;
    manifest["contact_fade_radius_mm"] = spec.contact_fade_radius_mm;
    manifest["gt_length_mm"] = res.gt_path.length_mm();
    manifest["start_mm"] = {res.start_mm[0], res.start_mm[1], res.start_mm[2]};
    manifest["end_mm"] = {res.end_mm[0], res.end_mm[1], res.end_mm[2]};
    manifest["contacts"] = json::array();
    for (const tt::Vec3& c : res.contact_centers_mm)
        manifest["contacts"].push_back({c[0], c[1], c[2]});

    std::ofstream mf(path("phantom.json"));
    if (!mf) throw tt::TrackError("cli", "cannot write phantom.json");
    mf << manifest.dump(2) << "\n";

    std::printf("phantom '%s': %zu contact regions, path length %s mm\n",
                tt::to_string(spec.kind).c_str(), res.contact_centers_mm.size(),
                fmt_mm(res.gt_path.length_mm()).c_str());
    std::printf("start %s,%s,%s  end %s,%s,%s\n", fmt_mm(res.start_mm[0]).c_str(),
                fmt_mm(res.start_mm[1]).c_str(), fmt_mm(res.start_mm[2]).c_str(),
                fmt_mm(res.end_mm[0]).c_str(), fmt_mm(res.end_mm[1]).c_str(),
                fmt_mm(res.end_mm[2]).c_str());
    std::printf("artifacts written to %s\n", out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph-based path tracking for convoluted tubular structures in 3D volumes"};
    app.require_subcommand(1);

    TrackArgs ta;
    CLI::App* track = app.add_subcommand("track", "Track a path through a segmented volume");
    track->add_option("--volume", ta.volume, "Input volume (.nii, .nii.gz, .raw)")->required();
    track->add_option("--seg", ta.seg, "Segmentation mask volume")->required();
    track->add_option("--start", ta.start, "Start point, mm: x,y,z")->required();
    track->add_option("--end", ta.end, "End point, mm: x,y,z")->required();
    track->add_option("--out", ta.out_dir, "Output directory")->required();
    track->add_option("--config", ta.config_file, "Pipeline config JSON");
    track->add_option("--mode", ta.mode, "sp | tsp | tsp+cyl (default tsp+cyl)");
    track->add_option("--spacing", ta.spacing, "Isotropic working spacing, mm");
    track->add_option("--lambda", ta.lambda, "Cylinder cost weight");
    track->add_option("--delta", ta.delta, "Euclidean/graph cost switch distance, mm");
    track->add_option("--ransac-iterations", ta.ransac_iters, "RANSAC iteration budget");
    track->add_option("--seed", ta.seed, "Random seed");
    track->add_option("--threads", ta.threads, "Worker thread cap (0 = all cores)");
    track->add_option("--crop-zmin", ta.crop_zmin, "Keep slices with z >= this (mm)");
    track->add_option("--crop-zmax", ta.crop_zmax, "Keep slices with z <= this (mm)");
    track->add_flag("--graph-edges", ta.graph_edges, "Also write graph_edges.txt");

    std::string pred_file, gt_file, eval_config, report_file;
    CLI::App* eval = app.add_subcommand("eval", "Compare a tracked path against ground truth");
    eval->add_option("--pred", pred_file, "Predicted path CSV")->required();
    eval->add_option("--gt", gt_file, "Ground-truth path CSV")->required();
    eval->add_option("--config", eval_config, "Pipeline config JSON (metrics section)");
    eval->add_option("--report", report_file, "Write the JSON report here");

    std::string spec_file, phantom_out, phantom_kind;
    long long phantom_seed = -1;
    int phantom_threads = 0;
    CLI::App* phantom = app.add_subcommand("phantom", "Generate a synthetic tube phantom");
    phantom->add_option("--spec", spec_file, "Phantom spec JSON");
    phantom->add_option("--out", phantom_out, "Output directory")->required();
    phantom->add_option("--kind", phantom_kind, "straight | helix | random_spline");
    phantom->add_option("--seed", phantom_seed, "Random seed override");
    phantom->add_option("--threads", phantom_threads, "Worker thread cap (0 = all cores)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (track->parsed()) {
            ta.crop = track->count("--crop-zmin") || track->count("--crop-zmax");
            if (ta.crop && !track->count("--crop-zmax")) ta.crop_zmax = 1e30;
            if (ta.crop && !track->count("--crop-zmin")) ta.crop_zmin = -1e30;
            return run_track_cmd(ta);
        }
        if (eval->parsed()) return run_eval_cmd(pred_file, gt_file, eval_config, report_file);
        if (phantom->parsed())
            return run_phantom_cmd(spec_file, phantom_out, phantom_kind, phantom_seed,
                                   phantom_threads);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
