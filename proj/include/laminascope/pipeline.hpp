#pragma once

/**
 * @file pipeline.hpp
 * @brief End-to-end lamina detection and epidural-depth measurement.
 *
 * Main method: CWD despeckle -> two square dilations -> Otsu x 0.9 threshold
 * -> disk erosion -> Prewitt edge map -> contour/RDP simplification -> Hough
 * -> among the detected segments, the one with the lowest lower endpoint is
 * the lamina of interest and its row is the epidural depth.
 *
 * Alternative method swaps the enhancement front end for phase symmetry with
 * small dilations and a halved Otsu threshold; the baseline method is the
 * template-matching LF detector.
 */

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "laminascope/config.hpp"
#include "laminascope/contour.hpp"
#include "laminascope/cwd.hpp"
#include "laminascope/edgemap.hpp"
#include "laminascope/hough.hpp"
#include "laminascope/image.hpp"
#include "laminascope/morphology.hpp"
#include "laminascope/phasesym.hpp"
#include "laminascope/template_match.hpp"

namespace laminascope {

enum class DetectStatus { Ok, FailedThreshold, FailedNoSegment };

inline std::string status_name(DetectStatus s) {
    switch (s) {
        case DetectStatus::Ok: return "ok";
        case DetectStatus::FailedThreshold: return "failed-threshold";
        case DetectStatus::FailedNoSegment: return "failed-no-segment";
    }
    return "ok";
}

struct StageTimings {
    double despeckle = 0.0;
    double phasesym = 0.0;
    double morphology = 0.0;
    double edge = 0.0;
    double rdp = 0.0;
    double hough = 0.0;
    double template_matching = 0.0;
    double total = 0.0;
};

struct DetectionResult {
    Method method = Method::Main;
    DetectStatus status = DetectStatus::Ok;
    double depth_px = -1.0;
    double depth_mm = -1.0;
    std::optional<LineSegment> chosen;
    std::vector<LineSegment> segments;
    StageTimings timings;
    bool outlier = false;  // set by detect_sequence
};

namespace pipeline_detail {

class StageClock {
    using clock = std::chrono::steady_clock;
    clock::time_point last_ = clock::now();

public:
    double lap() {
        const auto now = clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }
};

/// First row whose maximum intensity reaches half the image maximum.
inline int first_bright_row(const Image& img) {
    const double cut = 0.5 * max_value(img);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            if (img.at(x, y) >= cut) return y;
    return 0;
}

/// Edge map -> traced contours -> RDP -> re-rasterized point set.
inline std::vector<PixelPoint> simplify_edge_points(const BinaryImage& edges, double eps) {
    std::vector<PixelPoint> points;
    for (const Polyline& c : trace_contours(edges)) {
        const Polyline s = rdp_simplify(c, eps);
        const auto pts = rasterize_polyline(s);
        points.insert(points.end(), pts.begin(), pts.end());
    }
    std::sort(points.begin(), points.end(), [](const PixelPoint& a, const PixelPoint& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    });
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

/// Lowermost lower endpoint wins; ties break toward greater vote support.
inline std::optional<LineSegment> select_lamina(const std::vector<LineSegment>& segments) {
    std::optional<LineSegment> best;
    for (const auto& seg : segments) {
        if (!best) {
            best = seg;
            continue;
        }
        const double row = seg.lower_endpoint().y;
        const double best_row = best->lower_endpoint().y;
        if (row > best_row || (row == best_row && seg.support > best->support)) best = seg;
    }
    return best;
}

struct TailOutcome {
    DetectStatus status = DetectStatus::Ok;
    std::vector<LineSegment> segments;
    std::optional<LineSegment> chosen;
    double rdp_s = 0.0;
    double hough_s = 0.0;
};

/// Shared edge/contour/Hough/selection tail after binarization.
inline TailOutcome run_tail(const BinaryImage& bin, const PipelineConfig& cfg,
                            double& edge_seconds) {
    StageClock clock;
    const GradientField grad = prewitt(bin.to_image());
    const BinaryImage edges = edge_binarize(grad, cfg.edge_threshold_frac);
    edge_seconds += clock.lap();

    TailOutcome out;
    const auto points = simplify_edge_points(edges, cfg.rdp_epsilon);
    out.rdp_s = clock.lap();

    if (points.empty()) {
        out.status = DetectStatus::FailedNoSegment;
        return out;
    }

    const HoughAccumulator acc = hough_vote(points, cfg.hough);
    const auto peaks = find_peaks(acc, cfg.hough);
    if (!peaks.empty()) out.segments = extract_segments(points, peaks, cfg.hough);
    out.chosen = select_lamina(out.segments);
    out.hough_s = clock.lap();

    if (!out.chosen) out.status = DetectStatus::FailedNoSegment;
    return out;
}

}  // namespace pipeline_detail

/**
 * Runs the configured method on one image. Detection failures are reported
 * through the status field (never as a fabricated depth): failed-threshold
 * when the thresholding stage cannot separate bone from background,
 * failed-no-segment when no qualifying Hough segment survives.
 */
inline DetectionResult detect(const Image& img, const PipelineConfig& cfg) {
    cfg.validate();
    if (img.width < 64 || img.height < 64)
        throw std::invalid_argument("detect: image must be at least 64x64");

    using pipeline_detail::StageClock;
    DetectionResult res;
    res.method = cfg.method;

    StageClock clock;
    const Image denoised = cwd_denoise(img, cfg.despeckle);
    res.timings.despeckle = clock.lap();

    auto finish = [&](DetectStatus status) {
        res.status = status;
        res.timings.total = res.timings.despeckle + res.timings.phasesym +
                            res.timings.morphology + res.timings.edge + res.timings.rdp +
                            res.timings.hough + res.timings.template_matching;
        return res;
    };

    auto finish_with_depth = [&](const pipeline_detail::TailOutcome& tail) {
        res.segments = tail.segments;
        res.chosen = tail.chosen;
        res.timings.rdp += tail.rdp_s;
        res.timings.hough += tail.hough_s;
        if (tail.status != DetectStatus::Ok) return finish(tail.status);

        double depth = res.chosen->lower_endpoint().y;
        if (cfg.skin_offset) depth -= pipeline_detail::first_bright_row(img);
        res.depth_px = depth;
        res.depth_mm = depth * cfg.mm_per_px;
        return finish(DetectStatus::Ok);
    };

    if (cfg.method == Method::Main) {
        const auto se1 = StructuringElement::square(cfg.morphology.se1_size);
        const Image dilated = dilate(dilate(denoised, se1), se1);
        res.timings.morphology = clock.lap();

        // the paper's obese-patient failure mode: no discernible contrast
        if (max_value(dilated) - min_value(dilated) < cfg.min_contrast)
            return finish(DetectStatus::FailedThreshold);

        double level;
        try {
            level = otsu_threshold(dilated);
        } catch (const OtsuError&) {
            return finish(DetectStatus::FailedThreshold);
        }
        const BinaryImage bin = binarize(dilated, level, cfg.morphology.otsu_gain);
        const auto se2 = StructuringElement::disk(cfg.morphology.effective_se2_size());
        const BinaryImage chain = erode(bin, se2);
        res.timings.edge = clock.lap();

        auto tail = pipeline_detail::run_tail(chain, cfg, res.timings.edge);
        return finish_with_depth(tail);
    }

    if (cfg.method == Method::Alternative) {
        NoiseModel noise;
        noise.k_sigma = cfg.ps_k_sigma;
        noise.underestimate = cfg.ps_underestimate;
        const Image ps = phase_symmetry(denoised, cfg.phasesym, noise);
        res.timings.phasesym = clock.lap();

        const auto se = StructuringElement::square(cfg.ps_se_size);
        const Image grown = dilate(dilate(ps, se), se);
        res.timings.morphology = clock.lap();

        if (max_value(grown) - min_value(grown) < cfg.min_contrast)
            return finish(DetectStatus::FailedThreshold);

        double level;
        try {
            level = otsu_threshold(grown);
        } catch (const OtsuError&) {
            return finish(DetectStatus::FailedThreshold);
        }
        const BinaryImage bin = binarize(grown, level, cfg.ps_otsu_gain);
        res.timings.edge = clock.lap();

        auto tail = pipeline_detail::run_tail(bin, cfg, res.timings.edge);
        return finish_with_depth(tail);
    }

    // Baseline: phase-symmetry ridge map + template matching, depth at the LF.
    NoiseModel noise;
    noise.k_sigma = cfg.ps_k_sigma;
    noise.underestimate = cfg.ps_underestimate;
    const Image ps = phase_symmetry(denoised, cfg.phasesym, noise);
    Image ridge(denoised.width, denoised.height);
    for (size_t i = 0; i < ridge.size(); ++i) ridge.data[i] = denoised.data[i] * ps.data[i];
    res.timings.phasesym = clock.lap();

    const Image lam_tpl = render_lamina_template(cfg.baseline_lamina);
    const Image lf_tpl = render_lf_template(cfg.baseline_lf);
    const Image r_lam = match_template(ridge, lam_tpl, cfg.baseline_use_fft);
    const auto laminae = detect_laminae(r_lam, cfg.mm_per_px, cfg.baseline_max_laminae);
    if (laminae.empty()) {
        res.timings.template_matching = clock.lap();
        return finish(DetectStatus::FailedNoSegment);
    }

    const Image r_lf = match_template(ridge, lf_tpl, cfg.baseline_use_fft);
    std::vector<PixelPoint> lfs;
    try {
        lfs = detect_lf(r_lf, r_lam, laminae, cfg.mm_per_px, cfg.baseline_band_mm);
    } catch (const std::invalid_argument&) {
        res.timings.template_matching = clock.lap();
        return finish(DetectStatus::FailedNoSegment);
    }
    res.timings.template_matching = clock.lap();

    // synthesize the matched lamina bar as the reported segment
    const double beta =
        (cfg.baseline_lamina.angle_deg + cfg.baseline_lamina.probe_tilt_deg) * M_PI / 180.0;
    const double ux = std::sin(beta), uy = -std::cos(beta);
    const double hl = cfg.baseline_lamina.length_px / 2.0;
    LineSegment seg;
    seg.p1 = {laminae[0].x - ux * hl, laminae[0].y - uy * hl};
    seg.p2 = {laminae[0].x + ux * hl, laminae[0].y + uy * hl};
    seg.theta_deg = cfg.baseline_lamina.angle_deg + cfg.baseline_lamina.probe_tilt_deg;
    const double th = seg.theta_deg * M_PI / 180.0;
    seg.rho_px = laminae[0].x * std::cos(th) + laminae[0].y * std::sin(th);
    seg.support = static_cast<long>(std::lround(1000.0 * r_lam.at(laminae[0].x, laminae[0].y)));
    res.segments = {seg};
    res.chosen = seg;

    double depth = static_cast<double>(lfs[0].y);
    if (cfg.skin_offset) depth -= pipeline_detail::first_bright_row(img);
    res.depth_px = depth;
    res.depth_mm = depth * cfg.mm_per_px;
    return finish(DetectStatus::Ok);
}

/**
 * Per-frame detection over an ordered sequence. A frame whose depth deviates
 * more than 10 mm from the median of the prior ok frames is kept but flagged
 * as an outlier.
 */
inline std::vector<DetectionResult> detect_sequence(const std::vector<Image>& frames,
                                                    const PipelineConfig& cfg) {
    if (frames.empty())
        throw std::invalid_argument("detect_sequence: need at least one frame");

    std::vector<DetectionResult> results;
    std::vector<double> ok_depths;
    for (const Image& frame : frames) {
        DetectionResult r = detect(frame, cfg);
        if (r.status == DetectStatus::Ok && !ok_depths.empty()) {
            std::vector<double> sorted = ok_depths;
            std::sort(sorted.begin(), sorted.end());
            const size_t n = sorted.size();
            const double median =
                n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
            if (std::abs(r.depth_mm - median) > 10.0) r.outlier = true;
        }
        if (r.status == DetectStatus::Ok) ok_depths.push_back(r.depth_mm);
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace laminascope
