#include "sonarnet/errors.hpp"
#include "sonarnet/pipeline.hpp"
#include "sonarnet/synth.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace sonarnet {

namespace {

using nlohmann::json;

json parse_text(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string(what) + ": invalid JSON: " + e.what());
    }
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

constexpr double kDegToRad = std::numbers::pi / 180.0;

} // namespace

PipelineConfig parse_pipeline_config_json(const std::string& text) {
    const json j = parse_text(text, "pipeline config");
    PipelineConfig cfg = default_pipeline_config();
    try {
        if (j.contains("geometry")) {
            const json& g = j.at("geometry");
            if (g.contains("file")) {
                cfg.geometry = load_geometry_file(g.at("file").get<std::string>());
            } else if (g.contains("seed")) {
                cfg.geometry = default_array(g.at("seed").get<uint64_t>());
            } else {
                throw ConfigError("geometry: expected \"seed\" or \"file\"");
            }
        }
        if (j.contains("directions")) {
            const std::string kind = j.at("directions").at("kind").get<std::string>();
            cfg.directions = direction_grid(grid_kind_from_string(kind));
        }
        if (j.contains("chirp")) {
            const json& c = j.at("chirp");
            if (c.contains("f_start_hz")) cfg.chirp.f_start = c.at("f_start_hz").get<double>();
            if (c.contains("f_end_hz")) cfg.chirp.f_end = c.at("f_end_hz").get<double>();
            if (c.contains("duration_s")) cfg.chirp.duration = c.at("duration_s").get<double>();
        }
        if (j.contains("pdm_rate_hz")) cfg.pdm_rate = j.at("pdm_rate_hz").get<double>();
        cfg.chirp.sample_rate = cfg.pdm_rate;
        if (j.contains("demod")) {
            const json& d = j.at("demod");
            if (d.contains("cutoff_hz")) cfg.demod.cutoff_hz = d.at("cutoff_hz").get<double>();
            if (d.contains("taps")) cfg.demod.taps = d.at("taps").get<int>();
            if (d.contains("decimation")) cfg.demod.decimation = d.at("decimation").get<int>();
        }
        if (j.contains("pre_matched_filter_decimation")) {
            cfg.pre_mf_decimation = j.at("pre_matched_filter_decimation").get<int>();
        }
        if (j.contains("post_envelope_decimation")) {
            cfg.post_envelope_decimation = j.at("post_envelope_decimation").get<int>();
        }
        if (j.contains("envelope_smoothing")) {
            const json& s = j.at("envelope_smoothing");
            if (s.contains("cutoff_hz")) {
                cfg.envelope_smoothing.cutoff_hz = s.at("cutoff_hz").get<double>();
            }
            if (s.contains("taps")) cfg.envelope_smoothing.taps = s.at("taps").get<int>();
        }
        if (j.contains("speed_of_sound_mps")) {
            cfg.speed_of_sound = j.at("speed_of_sound_mps").get<double>();
        }
        if (j.contains("max_range_m")) cfg.max_range = j.at("max_range_m").get<double>();
        if (j.contains("processing_threads")) {
            cfg.processing_threads = j.at("processing_threads").get<int>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("pipeline config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_pipeline_config_file(const std::string& path) {
    return parse_pipeline_config_json(slurp(path));
}

std::string pipeline_config_to_json(const PipelineConfig& cfg) {
    json j;
    j["directions"] = {{"kind", to_string(cfg.directions.kind)}};
    j["chirp"] = {{"f_start_hz", cfg.chirp.f_start},
                  {"f_end_hz", cfg.chirp.f_end},
                  {"duration_s", cfg.chirp.duration}};
    j["pdm_rate_hz"] = cfg.pdm_rate;
    j["demod"] = {{"cutoff_hz", cfg.demod.cutoff_hz},
                  {"taps", cfg.demod.taps},
                  {"decimation", cfg.demod.decimation}};
    j["pre_matched_filter_decimation"] = cfg.pre_mf_decimation;
    j["post_envelope_decimation"] = cfg.post_envelope_decimation;
    j["envelope_smoothing"] = {{"cutoff_hz", cfg.envelope_smoothing.cutoff_hz},
                               {"taps", cfg.envelope_smoothing.taps}};
    j["speed_of_sound_mps"] = cfg.speed_of_sound;
    j["max_range_m"] = cfg.max_range;
    j["processing_threads"] = cfg.processing_threads;
    return j.dump(2);
}

Scene parse_scene_json(const std::string& text) {
    const json j = parse_text(text, "scene");
    Scene scene;
    try {
        if (j.contains("noise_rms")) scene.noise_rms = j.at("noise_rms").get<double>();
        if (j.contains("seed")) scene.seed = j.at("seed").get<uint64_t>();
        if (j.contains("reflectors")) {
            for (const json& r : j.at("reflectors")) {
                Reflector refl;
                refl.range = r.at("range_m").get<double>();
                refl.azimuth = r.at("azimuth_deg").get<double>() * kDegToRad;
                refl.elevation = r.at("elevation_deg").get<double>() * kDegToRad;
                refl.reflectivity = r.value("reflectivity", 1.0);
                scene.reflectors.push_back(refl);
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scene: ") + e.what());
    }
    if (scene.noise_rms < 0.0) throw ConfigError("scene: noise_rms must be >= 0");
    return scene;
}

Scene load_scene_file(const std::string& path) { return parse_scene_json(slurp(path)); }

std::string scene_to_json(const Scene& scene) {
    json j;
    j["noise_rms"] = scene.noise_rms;
    j["seed"] = scene.seed;
    j["reflectors"] = json::array();
    for (const Reflector& r : scene.reflectors) {
        j["reflectors"].push_back({{"range_m", r.range},
                                   {"azimuth_deg", r.azimuth / kDegToRad},
                                   {"elevation_deg", r.elevation / kDegToRad},
                                   {"reflectivity", r.reflectivity}});
    }
    return j.dump(2);
}

void save_scene_file(const Scene& scene, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot create scene file: " + path);
    out << scene_to_json(scene) << '\n';
    if (!out.good()) throw IoError("failed writing scene file: " + path);
}

} // namespace sonarnet
