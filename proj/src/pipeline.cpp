#include "tubetrack/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "tubetrack/exports.hpp"
#include "tubetrack/filters.hpp"

namespace tubetrack {

namespace {

class StageTimer {
public:
    explicit StageTimer(const char* name)
        : name_(name), start_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        const auto dt = std::chrono::steady_clock::now() - start_;
        const double ms =
            std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(dt).count();
        std::fprintf(stderr, "[%s] %.1f ms\n", name_, ms);
    }

private:
    const char* name_;
    std::chrono::steady_clock::time_point start_;
};

bool needs_resample(const Grid& g, double spacing) {
    if (!g.is_isotropic()) return true;
    return std::abs(g.spacing[0] - spacing) > 1e-9;
}

int snap_to_node(const SupervoxelLabeling& labeling, const Vec3& p, const char* which) {
    const auto v = labeling.labels.nearest_voxel(p);
    if (!labeling.labels.in_bounds(v[0], v[1], v[2]))
        throw TrackError("track", std::string(which) + " point lies outside the volume");
    const int label = labeling.labels.data[labeling.labels.index(v[0], v[1], v[2])];
    if (label <= 0)
        throw TrackError("track", std::string(which) +
                                      " point does not fall inside the segmentation mask");
    return label;
}

}  // namespace

TrackResult run_track(const Volume& volume_in, const VoxelMask& seg_in, const Vec3& start_mm,
                      const Vec3& end_mm, const PipelineConfig& cfg) {
    cfg.validate();
    const int threads = cfg.threads;

    Volume volume = volume_in;
    VoxelMask seg = seg_in;
    if (needs_resample(volume, cfg.spacing_mm)) {
        StageTimer t("resample");
        volume = resample_isotropic(volume, cfg.spacing_mm);
        seg = resample_mask_isotropic(seg_in, cfg.spacing_mm);
    }
    if (!volume.same_grid(seg))
        throw TrackError("track", "volume and segmentation grids differ after resampling");

    Volume walls;
    {
        StageTimer t("filters");
        walls = meijering_valley(volume, cfg.scales_mm, cfg.dark_sheets, threads);
    }
    VoxelMask walls_bin = binarize_walls(walls, cfg.binarize_threshold);

    TrackResult res;
    {
        StageTimer t("supervoxel");
        res.labeling = slic_supervoxels(walls, seg, cfg.sv_volume_mm3, cfg.compactness, cfg.seed,
                                        cfg.sv_iterations);
    }
    std::fprintf(stderr, "[supervoxel] %d supervoxels\n", res.labeling.count);
    if (res.labeling.count < 2)
        throw TrackError("track", "fewer than two supervoxels; check the segmentation mask");

    {
        StageTimer t("graph");
        res.rag = build_rag(res.labeling);
        compute_wall_costs(res.rag, res.labeling, walls);
        res.rag.lambda = cfg.mode == TrackMode::tsp_cyl ? cfg.lambda : 0.0;
    }
    std::fprintf(stderr, "[graph] %zu edges\n", res.rag.edges.size());

    res.start_node = snap_to_node(res.labeling, start_mm, "start");
    res.end_node = snap_to_node(res.labeling, end_mm, "end");
    if (res.start_node == res.end_node)
        throw TrackError("track", "start and end fall into the same supervoxel");

    if (cfg.mode != TrackMode::sp) {
        StageTimer t("sampling");
        const VoxelMask obstacles = invert_or(seg, walls_bin);
        const Volume dist = euclidean_distance_transform(obstacles, threads);
        res.must_pass = sample_must_pass(dist, res.labeling, cfg.theta_v_mm, cfg.theta_d_mm);
        std::fprintf(stderr, "[sampling] %zu peaks, %zu must-pass nodes\n",
                     res.must_pass.peaks.size(), res.must_pass.node_ids.size());
    }

    if (cfg.mode == TrackMode::tsp_cyl && !res.must_pass.peaks.empty()) {
        StageTimer t("cylinders");
        RansacParams rp;
        rp.iterations = cfg.ransac_iterations;
        rp.inlier_tol_mm = cfg.inlier_tol_mm;
        rp.min_radius_mm = cfg.min_radius_mm;
        rp.max_radius_mm = cfg.max_radius_mm;
        rp.min_support = cfg.min_support;
        rp.seed = cfg.seed;
        std::vector<Vec3> peak_positions;
        for (const Peak& p : res.must_pass.peaks) peak_positions.push_back(p.position_mm);
        res.cylinders = fit_local_cylinders(peak_positions, walls_bin, cfg.patch_mm,
                                            cfg.cyl_height_mm, rp, threads);
        for (const Cylinder& c : res.cylinders)
            if (c.valid) ++res.valid_cylinders;
        compute_cylinder_costs(res.rag, res.cylinders);
        std::fprintf(stderr, "[cylinders] %d of %zu fits valid\n", res.valid_cylinders,
                     res.cylinders.size());
    }

    {
        StageTimer t("path");
        if (cfg.mode == TrackMode::sp || res.must_pass.node_ids.empty()) {
            auto sp = dijkstra_shortest_path(res.rag, res.start_node, res.end_node);
            if (!sp)
                throw TrackError("track", "end point unreachable from start in the "
                                          "region adjacency graph");
            res.path.nodes = std::move(sp->nodes);
            res.path.total_cost = sp->cost;
            for (int id : res.path.nodes) res.path.polyline_mm.push_back(res.rag.centroid_mm[id]);
        } else {
            const TspGraph tg = build_tsp_graph(res.rag, res.must_pass, res.start_node,
                                                res.end_node, cfg.delta_mm, threads);
            const std::vector<int> order = solve_open_tsp(tg);
            res.path = stitch_full_path(res.rag, tg, order);
        }
    }
    std::fprintf(stderr, "[path] %zu nodes, cost %.6g\n", res.path.nodes.size(),
                 res.path.total_cost);

    res.path_curve = make_curve(res.path.polyline_mm);
    return res;
}

void write_track_artifacts(const TrackResult& result, const PipelineConfig& cfg,
                           const std::string& out_dir, bool graph_edges) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw TrackError("track", "cannot create output directory: " + out_dir);
    const auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

    write_path_csv(result.path, path("path.csv"));
    write_path_vtk(result.path, path("path.vtk"));
    write_peaks_csv(result.must_pass, path("peaks.csv"));
    write_cylinders_csv(result.cylinders, path("cylinders.csv"));
    write_cylinders_obj(result.cylinders, path("cylinders.obj"));
    if (graph_edges) write_edge_list(result.rag, path("graph_edges.txt"));
    save_config(cfg, path("effective_config.json"));

    nlohmann::json report;
    report["mode"] = to_string(cfg.mode);
    report["supervoxels"] = result.labeling.count;
    report["edges"] = result.rag.edges.size();
    report["lambda"] = result.rag.lambda;
    report["start_node"] = result.start_node;
    report["end_node"] = result.end_node;
    report["must_pass_nodes"] = result.must_pass.node_ids.size();
    report["peaks"] = result.must_pass.peaks.size();
    report["cylinders_total"] = result.cylinders.size();
    report["cylinders_valid"] = result.valid_cylinders;
    report["path_nodes"] = result.path.nodes.size();
    report["path_cost"] = result.path.total_cost;
    report["path_length_mm"] = result.path_curve.length_mm();

    std::ofstream out(path("report.json"));
    if (!out) throw TrackError("track", "cannot write report.json");
    out << report.dump(2) << "\n";
    if (!out) throw TrackError("track", "failed writing report.json");
}

}  // namespace tubetrack
