#include "tubetrack/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tubetrack/volume.hpp"

namespace tubetrack {

using nlohmann::json;

TrackMode track_mode_from_string(const std::string& s) {
    if (s == "sp") return TrackMode::sp;
    if (s == "tsp") return TrackMode::tsp;
    if (s == "tsp+cyl" || s == "tsp_cyl") return TrackMode::tsp_cyl;
    throw TrackError("config", "unknown tracking mode: " + s + " (expected sp, tsp, or tsp+cyl)");
}

std::string to_string(TrackMode m) {
    switch (m) {
        case TrackMode::sp: return "sp";
        case TrackMode::tsp: return "tsp";
        case TrackMode::tsp_cyl: return "tsp+cyl";
    }
    return "tsp+cyl";
}

void PipelineConfig::validate() const {
    auto require = [](bool cond, const std::string& what) {
        if (!cond) throw TrackError("config", what);
    };
    require(spacing_mm > 0.0, "volume.spacing_mm must be positive");
    require(!scales_mm.empty(), "filters.scales_mm must not be empty");
    for (double s : scales_mm) require(s > 0.0, "filters.scales_mm entries must be positive");
    require(binarize_threshold > 0.0 && binarize_threshold < 1.0,
            "filters.binarize_threshold must lie strictly between 0 and 1");
    require(sv_volume_mm3 > 0.0, "supervoxel.target_volume_mm3 must be positive");
    require(compactness > 0.0, "supervoxel.compactness must be positive");
    require(sv_iterations >= 1, "supervoxel.iterations must be at least 1");
    require(lambda >= 0.0, "graph.lambda must be non-negative");
    require(theta_v_mm > 0.0 && theta_d_mm > 0.0, "sampling thresholds must be positive");
    require(patch_mm > 0.0 && cyl_height_mm > 0.0, "cylinder patch and height must be positive");
    require(ransac_iterations >= 1, "cylinders.iterations must be at least 1");
    require(inlier_tol_mm > 0.0, "cylinders.inlier_tol_mm must be positive");
    require(min_radius_mm > 0.0 && max_radius_mm >= min_radius_mm,
            "cylinders radius range must satisfy 0 < min <= max");
    require(min_support >= 3, "cylinders.min_support must be at least 3");
    require(delta_mm > 0.0, "tsp.delta_mm must be positive");
    require(metrics.resample_step_mm > 0.0, "metrics.resample_step_mm must be positive");
    require(metrics.jump_tol_mm > 0.0 && metrics.dist_tol_mm > 0.0,
            "metrics tolerances must be positive");
}

namespace {

// Reads known keys from a section, rejecting unknown ones so typos fail
// loudly instead of silently keeping defaults.
class Section {
public:
    Section(const json& root, const std::string& name) : name_(name) {
        if (root.contains(name)) {
            if (!root.at(name).is_object())
                throw TrackError("config", "section '" + name + "' must be a JSON object");
            obj_ = root.at(name);
        }
    }

    template <typename T>
    void get(const char* key, T& target) {
        seen_.push_back(key);
        if (!obj_.contains(key)) return;
        try {
            target = obj_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw TrackError("config", "bad value for " + name_ + "." + key + ": " + e.what());
        }
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            bool known = false;
            for (const char* k : seen_)
                if (it.key() == k) known = true;
            if (!known)
                throw TrackError("config", "unknown key '" + name_ + "." + it.key() + "'");
        }
    }

private:
    std::string name_;
    json obj_ = json::object();
    std::vector<const char*> seen_;
};

}  // namespace

PipelineConfig config_from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw TrackError("config", std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw TrackError("config", "config root must be a JSON object");

    PipelineConfig cfg;
    Section volume(root, "volume");
    volume.get("spacing_mm", cfg.spacing_mm);
    volume.finish();

    Section filters(root, "filters");
    filters.get("scales_mm", cfg.scales_mm);
    filters.get("dark_sheets", cfg.dark_sheets);
    filters.get("binarize_threshold", cfg.binarize_threshold);
    filters.finish();

    Section supervoxel(root, "supervoxel");
    supervoxel.get("target_volume_mm3", cfg.sv_volume_mm3);
    supervoxel.get("compactness", cfg.compactness);
    supervoxel.get("iterations", cfg.sv_iterations);
    supervoxel.finish();

    Section graph(root, "graph");
    graph.get("lambda", cfg.lambda);
    graph.finish();

    Section sampling(root, "sampling");
    sampling.get("theta_v_mm", cfg.theta_v_mm);
    sampling.get("theta_d_mm", cfg.theta_d_mm);
    sampling.finish();

    Section cylinders(root, "cylinders");
    cylinders.get("patch_mm", cfg.patch_mm);
    cylinders.get("height_mm", cfg.cyl_height_mm);
    cylinders.get("iterations", cfg.ransac_iterations);
    cylinders.get("inlier_tol_mm", cfg.inlier_tol_mm);
    cylinders.get("min_radius_mm", cfg.min_radius_mm);
    cylinders.get("max_radius_mm", cfg.max_radius_mm);
    cylinders.get("min_support", cfg.min_support);
    cylinders.finish();

    Section tsp(root, "tsp");
    tsp.get("delta_mm", cfg.delta_mm);
    tsp.finish();

    Section metrics(root, "metrics");
    metrics.get("resample_step_mm", cfg.metrics.resample_step_mm);
    metrics.get("jump_tol_mm", cfg.metrics.jump_tol_mm);
    metrics.get("dist_tol_mm", cfg.metrics.dist_tol_mm);
    metrics.finish();

    Section run(root, "run");
    run.get("seed", cfg.seed);
    run.get("threads", cfg.threads);
    std::string mode = to_string(cfg.mode);
    run.get("mode", mode);
    cfg.mode = track_mode_from_string(mode);
    run.finish();

    static const char* known_sections[] = {"volume",   "filters", "supervoxel", "graph",
                                           "sampling", "cylinders", "tsp",      "metrics",
                                           "run"};
    for (auto it = root.begin(); it != root.end(); ++it) {
        bool known = false;
        for (const char* k : known_sections)
            if (it.key() == k) known = true;
        if (!known) throw TrackError("config", "unknown config section '" + it.key() + "'");
    }

    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TrackError("config", "cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str());
}

std::string config_to_json_text(const PipelineConfig& cfg) {
    json root;
    root["volume"] = {{"spacing_mm", cfg.spacing_mm}};
    root["filters"] = {{"scales_mm", cfg.scales_mm},
                       {"dark_sheets", cfg.dark_sheets},
                       {"binarize_threshold", cfg.binarize_threshold}};
    root["supervoxel"] = {{"target_volume_mm3", cfg.sv_volume_mm3},
                          {"compactness", cfg.compactness},
                          {"iterations", cfg.sv_iterations}};
    root["graph"] = {{"lambda", cfg.lambda}};
    root["sampling"] = {{"theta_v_mm", cfg.theta_v_mm}, {"theta_d_mm", cfg.theta_d_mm}};
    root["cylinders"] = {{"patch_mm", cfg.patch_mm},
                         {"height_mm", cfg.cyl_height_mm},
                         {"iterations", cfg.ransac_iterations},
                         {"inlier_tol_mm", cfg.inlier_tol_mm},
                         {"min_radius_mm", cfg.min_radius_mm},
                         {"max_radius_mm", cfg.max_radius_mm},
                         {"min_support", cfg.min_support}};
    root["tsp"] = {{"delta_mm", cfg.delta_mm}};
    root["metrics"] = {{"resample_step_mm", cfg.metrics.resample_step_mm},
                       {"jump_tol_mm", cfg.metrics.jump_tol_mm},
                       {"dist_tol_mm", cfg.metrics.dist_tol_mm}};
    root["run"] = {{"seed", cfg.seed}, {"threads", cfg.threads}, {"mode", to_string(cfg.mode)}};
    return root.dump(2) + "\n";
}

void save_config(const PipelineConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw TrackError("config", "cannot write config file: " + path);
    out << config_to_json_text(cfg);
    if (!out) throw TrackError("config", "failed writing config file: " + path);
}

}  // namespace tubetrack
