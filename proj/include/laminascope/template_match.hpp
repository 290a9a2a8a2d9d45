#pragma once

/**
 * @file template_match.hpp
 * @brief Template-matching lamina/LF detector (the comparator method):
 *        sliding-window Pearson correlation, iterative lamina picking with a
 *        20 mm exclusion radius, and LF localization below each lamina.
 */

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "laminascope/contour.hpp"
#include "laminascope/fft.hpp"
#include "laminascope/image.hpp"

namespace laminascope {

struct LaminaTemplate {
    double angle_deg = 32.0;       // nominal lamina inclination
    double probe_tilt_deg = 8.0;   // beam-frame tilt, added to the nominal angle
    double length_px = 40.0;
    double along_blur_sigma = 2.0;
    double across_blur_sigma = 3.0;
};

struct LfTemplate {
    double length_px = 24.0;
    double blur_sigma = 2.0;
};

namespace tm_detail {

/// Gaussian-profiled bar along the unit direction (ux, uy); zero-mean,
/// unit-variance normalized (Pearson precondition).
inline Image render_bar(double ux, double uy, double half_len, double along_sigma,
                        double across_sigma) {
    const double margin = 3.0 * std::max(along_sigma, across_sigma);
    const int half_w = static_cast<int>(std::ceil(std::abs(ux) * half_len + margin));
    const int half_h = static_cast<int>(std::ceil(std::abs(uy) * half_len + margin));
    const int w = 2 * half_w + 1;
    const int h = 2 * half_h + 1;

    Image tpl(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double px = x - half_w, py = y - half_h;
            const double along = px * ux + py * uy;
            const double across = -px * uy + py * ux;
            const double beyond = std::max(0.0, std::abs(along) - half_len);
            tpl.at(x, y) = std::exp(-across * across / (2.0 * across_sigma * across_sigma)) *
                           std::exp(-beyond * beyond / (2.0 * along_sigma * along_sigma));
        }
    }

    const double mean = mean_value(tpl);
    double var = 0.0;
    for (double& v : tpl.data) {
        v -= mean;
        var += v * v;
    }
    const double sd = std::sqrt(var / static_cast<double>(tpl.size()));
    if (sd > 0)
        for (double& v : tpl.data) v /= sd;
    return tpl;
}

}  // namespace tm_detail

/// Rendered diagonal lamina bar at the beam-frame inclination.
inline Image render_lamina_template(const LaminaTemplate& p) {
    const double beta = (p.angle_deg + p.probe_tilt_deg) * M_PI / 180.0;  // from vertical
    const double ux = std::sin(beta), uy = -std::cos(beta);
    return tm_detail::render_bar(ux, uy, p.length_px / 2.0, p.along_blur_sigma,
                                 p.across_blur_sigma);
}

/// Short horizontal bright bar for the ligamentum flavum.
inline Image render_lf_template(const LfTemplate& p) {
    return tm_detail::render_bar(1.0, 0.0, p.length_px / 2.0, p.blur_sigma, p.blur_sigma);
}

/**
 * Sliding-window Pearson correlation map, defined where the template fits
 * entirely inside the image (0 elsewhere and for zero-variance windows).
 * The direct windowed formula is the default; use_fft switches the cross
 * term to a frequency-domain correlation.
 */
inline Image match_template(const Image& img, const Image& tpl, bool use_fft = false) {
    if (tpl.width >= img.width || tpl.height >= img.height)
        throw std::invalid_argument("match_template: template must be smaller than the image");

    const int tw = tpl.width, th = tpl.height;
    const int cx = tw / 2, cy = th / 2;
    const double n = static_cast<double>(tpl.size());

    double t_sum = 0.0, t_sq = 0.0;
    for (double v : tpl.data) {
        t_sum += v;
        t_sq += v * v;
    }
    const double t_mean = t_sum / n;
    const double t_var = t_sq - n * t_mean * t_mean;

    Image out(img.width, img.height, 0.0);
    if (t_var <= 0.0) return out;

    Image cross;  // cross(x,y) = sum over template of img * tpl at top-left (x,y)
    if (use_fft) {
        const int pw = next_pow2(img.width + tw);
        const int ph = next_pow2(img.height + th);
        ComplexGrid fa(pw, ph), fb(pw, ph);
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x) fa.at(x, y) = img.at(x, y);
        for (int y = 0; y < th; ++y)
            for (int x = 0; x < tw; ++x) fb.at(x, y) = tpl.at(x, y);
        fft2_inplace(fa, false);
        fft2_inplace(fb, false);
        for (size_t i = 0; i < fa.data.size(); ++i) fa.data[i] *= std::conj(fb.data[i]);
        fft2_inplace(fa, true);
        cross = Image(img.width, img.height);
        for (int y = 0; y + th <= img.height; ++y)
            for (int x = 0; x + tw <= img.width; ++x) cross.at(x, y) = fa.at(x, y).real();
    }

    for (int y = 0; y + th <= img.height; ++y) {
        for (int x = 0; x + tw <= img.width; ++x) {
            double w_sum = 0.0, w_sq = 0.0, wt = 0.0;
            if (use_fft) {
                for (int ty = 0; ty < th; ++ty)
                    for (int tx = 0; tx < tw; ++tx) {
                        const double w = img.at(x + tx, y + ty);
                        w_sum += w;
                        w_sq += w * w;
                    }
                wt = cross.at(x, y);
            } else {
                for (int ty = 0; ty < th; ++ty)
                    for (int tx = 0; tx < tw; ++tx) {
                        const double w = img.at(x + tx, y + ty);
                        const double t = tpl.at(tx, ty);
                        w_sum += w;
                        w_sq += w * w;
                        wt += w * t;
                    }
            }
            const double w_mean = w_sum / n;
            const double w_var = w_sq - n * w_mean * w_mean;
            if (w_var <= 0.0) continue;
            const double num = wt - w_mean * t_sum;
            out.at(x + cx, y + cy) = num / std::sqrt(w_var * t_var);
        }
    }
    return out;
}

/**
 * Iteratively takes the global similarity maximum, excluding a 20 mm-radius
 * disk around each accepted location; stops early when the next maximum
 * falls below half the first, or after max_count laminae.
 */
inline std::vector<PixelPoint> detect_laminae(const Image& sim, double mm_per_px,
                                              int max_count = 3) {
    if (mm_per_px <= 0.0)
        throw std::invalid_argument("detect_laminae: mm_per_px must be positive");

    const double excl_px = 20.0 / mm_per_px;
    Image work = sim;
    std::vector<PixelPoint> found;
    double first_peak = 0.0;

    for (int k = 0; k < max_count; ++k) {
        double best = -2.0;
        PixelPoint at{-1, -1};
        for (int y = 0; y < work.height; ++y)
            for (int x = 0; x < work.width; ++x)
                if (work.at(x, y) > best) {
                    best = work.at(x, y);
                    at = {x, y};
                }
        if (at.x < 0 || best <= 0.0) break;
        if (k == 0)
            first_peak = best;
        else if (best < 0.5 * first_peak)
            break;

        found.push_back(at);
        for (int y = 0; y < work.height; ++y)
            for (int x = 0; x < work.width; ++x)
                if (std::hypot(double(x - at.x), double(y - at.y)) <= excl_px)
                    work.at(x, y) = -2.0;
    }
    return found;
}

/**
 * For each lamina, the argmax of (R_LF - R_lam) over the band up to band_mm
 * below the lamina's lower endpoint (ties toward the smaller row, then
 * column). lower_offset_px shifts the band anchor from the matched template
 * centre down to the bar's lower end.
 */
inline std::vector<PixelPoint> detect_lf(const Image& r_lf, const Image& r_lam,
                                         const std::vector<PixelPoint>& lamina_locs,
                                         double mm_per_px, double band_mm = 15.0,
                                         double lower_offset_px = 0.0) {
    if (r_lf.width != r_lam.width || r_lf.height != r_lam.height)
        throw std::invalid_argument("detect_lf: similarity maps differ in size");
    if (lamina_locs.empty())
        throw std::invalid_argument("detect_lf: no lamina locations");

    const int band_px = static_cast<int>(std::lround(band_mm / mm_per_px));
    const int offset = static_cast<int>(std::lround(lower_offset_px));
    std::vector<PixelPoint> out;
    for (const auto& lam : lamina_locs) {
        const int y0 = lam.y + offset + 1;
        const int y1 = std::min(r_lf.height - 1, lam.y + offset + band_px);
        if (y0 > y1)
            throw std::invalid_argument("detect_lf: empty search band below lamina");

        double best = -1e300;
        PixelPoint at{0, y0};
        for (int y = y0; y <= y1; ++y)
            for (int x = 0; x < r_lf.width; ++x) {
                const double v = r_lf.at(x, y) - r_lam.at(x, y);
                if (v > best) {
                    best = v;
                    at = {x, y};
                }
            }
        out.push_back(at);
    }
    return out;
}

}  // namespace laminascope
