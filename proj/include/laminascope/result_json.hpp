#pragma once

/**
 * @file result_json.hpp
 * @brief JSON serialization of detection results (schema consumed by the
 *        evaluation harness) and overlay rendering.
 */

#include <string>

#include <json.hpp>

#include "laminascope/pipeline.hpp"

namespace laminascope {

inline nlohmann::json config_to_json(const PipelineConfig& c) {
    nlohmann::json j;
    j["pipeline"] = {{"method", method_name(c.method)},
                     {"mm_per_px", c.mm_per_px},
                     {"min_contrast", c.min_contrast},
                     {"skin_offset", c.skin_offset}};
    j["despeckle"] = {{"alpha", c.despeckle.alpha},
                      {"iterations", c.despeckle.iterations},
                      {"scales", c.despeckle.scales},
                      {"window", c.despeckle.window},
                      {"step", c.despeckle.step},
                      {"region_x", c.despeckle.homogeneous_region.x},
                      {"region_y", c.despeckle.homogeneous_region.y},
                      {"region_w", c.despeckle.homogeneous_region.w},
                      {"region_h", c.despeckle.homogeneous_region.h}};
    j["morphology"] = {{"se1_size", c.morphology.se1_size},
                       {"se2_mode", c.morphology.se2_mode == Se2Mode::Derived ? "derived" : "literal"},
                       {"se2_size", c.morphology.se2_size},
                       {"se2_effective_size", c.morphology.effective_se2_size()},
                       {"otsu_gain", c.morphology.otsu_gain}};
    j["edge"] = {{"threshold_frac", c.edge_threshold_frac}};
    j["rdp"] = {{"epsilon", c.rdp_epsilon}};
    j["hough"] = {{"theta_min", c.hough.theta_min_deg},
                  {"theta_max", c.hough.theta_max_deg},
                  {"theta_res", c.hough.theta_res_deg},
                  {"rho_res", c.hough.rho_res_px},
                  {"n_peaks", c.hough.n_peaks},
                  {"min_seg_len", c.hough.min_seg_len_px},
                  {"max_gap", c.hough.max_gap_px}};
    j["phasesym"] = {{"scales", c.phasesym.scales},
                     {"orientations", c.phasesym.orientations_deg},
                     {"sigma_ratio", c.phasesym.sigma_ratio},
                     {"lowpass_radius", c.phasesym.lowpass_radius},
                     {"lowpass_sharpness", c.phasesym.lowpass_sharpness},
                     {"min_wavelength", c.phasesym.min_wavelength},
                     {"scale_mult", c.phasesym.scale_mult},
                     {"angular_sigma_mult", c.phasesym.angular_sigma_mult},
                     {"k_sigma", c.ps_k_sigma},
                     {"underestimate", c.ps_underestimate},
                     {"se_size", c.ps_se_size},
                     {"otsu_gain", c.ps_otsu_gain}};
    j["baseline"] = {{"angle", c.baseline_lamina.angle_deg},
                     {"probe_tilt", c.baseline_lamina.probe_tilt_deg},
                     {"length", c.baseline_lamina.length_px},
                     {"along_sigma", c.baseline_lamina.along_blur_sigma},
                     {"across_sigma", c.baseline_lamina.across_blur_sigma},
                     {"lf_length", c.baseline_lf.length_px},
                     {"lf_sigma", c.baseline_lf.blur_sigma},
                     {"exclusion_mm", c.baseline_exclusion_mm},
                     {"band_mm", c.baseline_band_mm},
                     {"max_laminae", c.baseline_max_laminae},
                     {"use_fft", c.baseline_use_fft}};
    return j;
}

inline nlohmann::json segment_to_json(const LineSegment& s) {
    return {{"p1", {{"x", s.p1.x}, {"y", s.p1.y}}},
            {"p2", {{"x", s.p2.x}, {"y", s.p2.y}}},
            {"theta", s.theta_deg},
            {"rho", s.rho_px},
            {"support", s.support}};
}

inline nlohmann::json result_to_json(const DetectionResult& r, const PipelineConfig& cfg,
                                     const std::string& image_id = "") {
    nlohmann::json j;
    j["method"] = method_name(r.method);
    j["status"] = status_name(r.status);
    if (!image_id.empty()) j["image_id"] = image_id;

    if (r.status == DetectStatus::Ok) {
        j["depth_px"] = r.depth_px;
        j["depth_mm"] = r.depth_mm;
        j["chosen"] = segment_to_json(*r.chosen);
    } else {
        j["depth_px"] = nullptr;
        j["depth_mm"] = nullptr;
        j["chosen"] = nullptr;
    }

    j["segments"] = nlohmann::json::array();
    for (const auto& s : r.segments) j["segments"].push_back(segment_to_json(s));

    j["timings"] = {{"despeckle", r.timings.despeckle},
                    {"morphology", r.timings.morphology},
                    {"edge", r.timings.edge},
                    {"rdp", r.timings.rdp},
                    {"hough", r.timings.hough},
                    {"total", r.timings.total}};
    if (r.timings.phasesym > 0) j["timings"]["phasesym"] = r.timings.phasesym;
    if (r.timings.template_matching > 0)
        j["timings"]["template_matching"] = r.timings.template_matching;

    j["outlier"] = r.outlier;
    j["config"] = config_to_json(cfg);
    return j;
}

/// Input image with the accepted segments and the depth marker burned in.
inline Image render_overlay(const Image& img, const DetectionResult& r) {
    Image out = img;

    auto draw_segment = [&out](const LineSegment& s, double value) {
        const double len = s.length();
        const int steps = std::max(2, static_cast<int>(std::ceil(len * 2)));
        for (int i = 0; i <= steps; ++i) {
            const double t = static_cast<double>(i) / steps;
            const int x = static_cast<int>(std::lround(s.p1.x + t * (s.p2.x - s.p1.x)));
            const int y = static_cast<int>(std::lround(s.p1.y + t * (s.p2.y - s.p1.y)));
            if (out.in_bounds(x, y)) out.at(x, y) = value;
        }
    };

    for (const auto& s : r.segments) draw_segment(s, 0.7);
    if (r.chosen) {
        draw_segment(*r.chosen, 1.0);
        const auto& lo = r.chosen->lower_endpoint();
        const int cx = static_cast<int>(std::lround(lo.x));
        const int cy = static_cast<int>(std::lround(lo.y));
        for (int d = -6; d <= 6; ++d) {
            if (out.in_bounds(cx + d, cy)) out.at(cx + d, cy) = 1.0;
            if (out.in_bounds(cx, cy + d)) out.at(cx, cy + d) = 1.0;
        }
        // dashed depth row across the frame
        for (int x = 0; x < out.width; x += 6)
            for (int k = 0; k < 3 && x + k < out.width; ++k)
                if (out.in_bounds(x + k, cy)) out.at(x + k, cy) = 1.0;
    }
    return out;
}

}  // namespace laminascope
