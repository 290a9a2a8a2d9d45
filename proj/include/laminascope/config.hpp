#pragma once

/**
 * @file config.hpp
 * @brief Pipeline configuration: defaults, INI-style config files
 *        (sections of key=value lines) and CLI-style overrides.
 *
 * Unknown keys are rejected with the list of valid keys for the section, so
 * typos fail loudly instead of silently running on defaults.
 */

#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "laminascope/cwd.hpp"
#include "laminascope/hough.hpp"
#include "laminascope/morphology.hpp"
#include "laminascope/phasesym.hpp"
#include "laminascope/template_match.hpp"

namespace laminascope {

enum class Method { Main, Alternative, Baseline };

inline std::string method_name(Method m) {
    switch (m) {
        case Method::Main: return "main";
        case Method::Alternative: return "alternative";
        case Method::Baseline: return "template-matching";
    }
    return "main";
}

inline Method parse_method(const std::string& s) {
    if (s == "main") return Method::Main;
    if (s == "alternative") return Method::Alternative;
    if (s == "baseline" || s == "template-matching") return Method::Baseline;
    throw std::invalid_argument("unknown method '" + s + "' (main|alternative|baseline)");
}

struct PipelineConfig {
    // [pipeline]
    Method method = Method::Main;
    double mm_per_px = 0.15;
    double min_contrast = 0.08;  // dynamic range below this fails the threshold stage
    bool skin_offset = false;    // measure depth from the first bright row instead of row 0

    // [despeckle]
    DiffusionConfig despeckle;

    // [morphology]
    ShapeChainParams morphology;

    // [edge]
    double edge_threshold_frac = 0.2;

    // [rdp]
    double rdp_epsilon = 2.0;

    // [hough]
    HoughConfig hough;

    // [phasesym]
    LogGaborBank phasesym;
    double ps_k_sigma = 2.0;
    double ps_underestimate = 0.9;
    int ps_se_size = 3;        // square SE for the two dilations on the PS map
    double ps_otsu_gain = 0.5; // halved Otsu threshold on the PS map

    // [baseline]
    LaminaTemplate baseline_lamina;
    LfTemplate baseline_lf;
    double baseline_exclusion_mm = 20.0;
    double baseline_band_mm = 15.0;
    int baseline_max_laminae = 3;
    bool baseline_use_fft = false;

    void validate() const {
        if (mm_per_px <= 0) throw std::invalid_argument("pipeline.mm_per_px must be positive");
        despeckle.validate();
        hough.validate();
        phasesym.validate();
        if (ps_se_size < 1) throw std::invalid_argument("phasesym.se_size must be >= 1");
        if (rdp_epsilon <= 0) throw std::invalid_argument("rdp.epsilon must be positive");
        if (edge_threshold_frac <= 0 || edge_threshold_frac >= 1)
            throw std::invalid_argument("edge.threshold_frac must lie in (0,1)");
    }
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace config_detail {

inline double to_double(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw ConfigError("bad numeric value '" + v + "' for key " + key);
    }
}

inline int to_int(const std::string& v, const std::string& key) {
    const double d = to_double(v, key);
    const int i = static_cast<int>(d);
    if (i != d) throw ConfigError("expected integer value for key " + key);
    return i;
}

inline bool to_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw ConfigError("bad boolean value '" + v + "' for key " + key);
}

inline std::vector<double> to_double_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(to_double(item, key));
    if (out.empty()) throw ConfigError("empty list for key " + key);
    return out;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

using Setter = std::function<void(PipelineConfig&, const std::string&)>;

inline const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"pipeline.method", [](PipelineConfig& c, const std::string& v) { c.method = parse_method(v); }},
        {"pipeline.mm_per_px", [](PipelineConfig& c, const std::string& v) { c.mm_per_px = to_double(v, "pipeline.mm_per_px"); }},
        {"pipeline.min_contrast", [](PipelineConfig& c, const std::string& v) { c.min_contrast = to_double(v, "pipeline.min_contrast"); }},
        {"pipeline.skin_offset", [](PipelineConfig& c, const std::string& v) { c.skin_offset = to_bool(v, "pipeline.skin_offset"); }},

        {"despeckle.alpha", [](PipelineConfig& c, const std::string& v) { c.despeckle.alpha = to_double(v, "despeckle.alpha"); }},
        {"despeckle.iterations", [](PipelineConfig& c, const std::string& v) { c.despeckle.iterations = to_int(v, "despeckle.iterations"); }},
        {"despeckle.scales", [](PipelineConfig& c, const std::string& v) { c.despeckle.scales = to_int(v, "despeckle.scales"); }},
        {"despeckle.window", [](PipelineConfig& c, const std::string& v) { c.despeckle.window = to_int(v, "despeckle.window"); }},
        {"despeckle.step", [](PipelineConfig& c, const std::string& v) { c.despeckle.step = to_double(v, "despeckle.step"); }},
        {"despeckle.region_x", [](PipelineConfig& c, const std::string& v) { c.despeckle.homogeneous_region.x = to_int(v, "despeckle.region_x"); }},
        {"despeckle.region_y", [](PipelineConfig& c, const std::string& v) { c.despeckle.homogeneous_region.y = to_int(v, "despeckle.region_y"); }},
        {"despeckle.region_w", [](PipelineConfig& c, const std::string& v) { c.despeckle.homogeneous_region.w = to_int(v, "despeckle.region_w"); }},
        {"despeckle.region_h", [](PipelineConfig& c, const std::string& v) { c.despeckle.homogeneous_region.h = to_int(v, "despeckle.region_h"); }},

        {"morphology.se1_size", [](PipelineConfig& c, const std::string& v) { c.morphology.se1_size = to_int(v, "morphology.se1_size"); }},
        {"morphology.se2_mode",
         [](PipelineConfig& c, const std::string& v) {
             if (v == "literal") c.morphology.se2_mode = Se2Mode::Literal;
             else if (v == "derived") c.morphology.se2_mode = Se2Mode::Derived;
             else throw ConfigError("morphology.se2_mode must be literal|derived");
         }},
        {"morphology.se2_size", [](PipelineConfig& c, const std::string& v) { c.morphology.se2_size = to_int(v, "morphology.se2_size"); }},
        {"morphology.otsu_gain", [](PipelineConfig& c, const std::string& v) { c.morphology.otsu_gain = to_double(v, "morphology.otsu_gain"); }},

        {"edge.threshold_frac", [](PipelineConfig& c, const std::string& v) { c.edge_threshold_frac = to_double(v, "edge.threshold_frac"); }},

        {"rdp.epsilon", [](PipelineConfig& c, const std::string& v) { c.rdp_epsilon = to_double(v, "rdp.epsilon"); }},

        {"hough.theta_min", [](PipelineConfig& c, const std::string& v) { c.hough.theta_min_deg = to_double(v, "hough.theta_min"); }},
        {"hough.theta_max", [](PipelineConfig& c, const std::string& v) { c.hough.theta_max_deg = to_double(v, "hough.theta_max"); }},
        {"hough.theta_res", [](PipelineConfig& c, const std::string& v) { c.hough.theta_res_deg = to_double(v, "hough.theta_res"); }},
        {"hough.rho_res", [](PipelineConfig& c, const std::string& v) { c.hough.rho_res_px = to_double(v, "hough.rho_res"); }},
        {"hough.n_peaks", [](PipelineConfig& c, const std::string& v) { c.hough.n_peaks = to_int(v, "hough.n_peaks"); }},
        {"hough.min_seg_len", [](PipelineConfig& c, const std::string& v) { c.hough.min_seg_len_px = to_double(v, "hough.min_seg_len"); }},
        {"hough.max_gap", [](PipelineConfig& c, const std::string& v) { c.hough.max_gap_px = to_double(v, "hough.max_gap"); }},

        {"phasesym.scales", [](PipelineConfig& c, const std::string& v) { c.phasesym.scales = to_int(v, "phasesym.scales"); }},
        {"phasesym.orientations", [](PipelineConfig& c, const std::string& v) { c.phasesym.orientations_deg = to_double_list(v, "phasesym.orientations"); }},
        {"phasesym.sigma_ratio", [](PipelineConfig& c, const std::string& v) { c.phasesym.sigma_ratio = to_double(v, "phasesym.sigma_ratio"); }},
        {"phasesym.lowpass_radius", [](PipelineConfig& c, const std::string& v) { c.phasesym.lowpass_radius = to_double(v, "phasesym.lowpass_radius"); }},
        {"phasesym.lowpass_sharpness", [](PipelineConfig& c, const std::string& v) { c.phasesym.lowpass_sharpness = to_int(v, "phasesym.lowpass_sharpness"); }},
        {"phasesym.min_wavelength", [](PipelineConfig& c, const std::string& v) { c.phasesym.min_wavelength = to_double(v, "phasesym.min_wavelength"); }},
        {"phasesym.scale_mult", [](PipelineConfig& c, const std::string& v) { c.phasesym.scale_mult = to_double(v, "phasesym.scale_mult"); }},
        {"phasesym.angular_sigma_mult", [](PipelineConfig& c, const std::string& v) { c.phasesym.angular_sigma_mult = to_double(v, "phasesym.angular_sigma_mult"); }},
        {"phasesym.k_sigma", [](PipelineConfig& c, const std::string& v) { c.ps_k_sigma = to_double(v, "phasesym.k_sigma"); }},
        {"phasesym.underestimate", [](PipelineConfig& c, const std::string& v) { c.ps_underestimate = to_double(v, "phasesym.underestimate"); }},
        {"phasesym.se_size", [](PipelineConfig& c, const std::string& v) { c.ps_se_size = to_int(v, "phasesym.se_size"); }},
        {"phasesym.otsu_gain", [](PipelineConfig& c, const std::string& v) { c.ps_otsu_gain = to_double(v, "phasesym.otsu_gain"); }},

        {"baseline.angle", [](PipelineConfig& c, const std::string& v) { c.baseline_lamina.angle_deg = to_double(v, "baseline.angle"); }},
        {"baseline.probe_tilt", [](PipelineConfig& c, const std::string& v) { c.baseline_lamina.probe_tilt_deg = to_double(v, "baseline.probe_tilt"); }},
        {"baseline.length", [](PipelineConfig& c, const std::string& v) { c.baseline_lamina.length_px = to_double(v, "baseline.length"); }},
        {"baseline.along_sigma", [](PipelineConfig& c, const std::string& v) { c.baseline_lamina.along_blur_sigma = to_double(v, "baseline.along_sigma"); }},
        {"baseline.across_sigma", [](PipelineConfig& c, const std::string& v) { c.baseline_lamina.across_blur_sigma = to_double(v, "baseline.across_sigma"); }},
        {"baseline.lf_length", [](PipelineConfig& c, const std::string& v) { c.baseline_lf.length_px = to_double(v, "baseline.lf_length"); }},
        {"baseline.lf_sigma", [](PipelineConfig& c, const std::string& v) { c.baseline_lf.blur_sigma = to_double(v, "baseline.lf_sigma"); }},
        {"baseline.exclusion_mm", [](PipelineConfig& c, const std::string& v) { c.baseline_exclusion_mm = to_double(v, "baseline.exclusion_mm"); }},
        {"baseline.band_mm", [](PipelineConfig& c, const std::string& v) { c.baseline_band_mm = to_double(v, "baseline.band_mm"); }},
        {"baseline.max_laminae", [](PipelineConfig& c, const std::string& v) { c.baseline_max_laminae = to_int(v, "baseline.max_laminae"); }},
        {"baseline.use_fft", [](PipelineConfig& c, const std::string& v) { c.baseline_use_fft = to_bool(v, "baseline.use_fft"); }},
    };
    return table;
}

inline std::string valid_keys_for(const std::string& section) {
    std::string out;
    for (const auto& [key, _] : setters()) {
        if (key.rfind(section + ".", 0) == 0) {
            if (!out.empty()) out += ", ";
            out += key;
        }
    }
    if (out.empty()) {
        for (const auto& [key, _] : setters()) {
            if (!out.empty()) out += ", ";
            out += key;
        }
    }
    return out;
}

}  // namespace config_detail

/// Applies one "section.key=value" override.
inline void apply_config_value(PipelineConfig& cfg, const std::string& dotted_key,
                               const std::string& value) {
    const auto& table = config_detail::setters();
    const auto it = table.find(dotted_key);
    if (it == table.end()) {
        const auto dot = dotted_key.find('.');
        const std::string section = dot == std::string::npos ? "" : dotted_key.substr(0, dot);
        throw ConfigError("unknown config key '" + dotted_key + "'; valid keys: " +
                          config_detail::valid_keys_for(section));
    }
    it->second(cfg, value);
}

/// Parses INI-style text: [section] headers and key=value lines; '#' or ';'
/// start a comment.
inline void apply_config_text(PipelineConfig& cfg, const std::string& text) {
    using config_detail::trim;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any [section]");
        apply_config_value(cfg, section + "." + key, value);
    }
}

}  // namespace laminascope
