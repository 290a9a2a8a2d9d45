#pragma once

/**
 * @file hough.hpp
 * @brief Angle-restricted Hough line detection: voting, accumulator peak
 *        selection with non-maximum suppression, and extraction of supported
 *        line segments.
 *
 * Theta is the angle of the line's normal: a point (x, y) votes for
 * rho = x*cos(theta) + y*sin(theta) at every theta bin in the configured
 * range. Negative rho is handled through a bin offset rather than by
 * extending the theta range.
 */

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "laminascope/contour.hpp"

namespace laminascope {

struct HoughConfig {
    double theta_min_deg = 20.0;
    double theta_max_deg = 75.0;
    double theta_res_deg = 5.0;
    double rho_res_px = 2.0;
    int n_peaks = 20;
    double min_seg_len_px = 20.0;
    double max_gap_px = 8.0;

    int theta_bin_count() const {
        return static_cast<int>(std::floor((theta_max_deg - theta_min_deg) / theta_res_deg + 1e-9)) + 1;
    }
    double theta_of_bin(int k) const { return theta_min_deg + k * theta_res_deg; }

    void validate() const {
        if (theta_min_deg >= theta_max_deg)
            throw std::invalid_argument("HoughConfig: theta_min must be below theta_max");
        if (theta_res_deg <= 0 || rho_res_px <= 0)
            throw std::invalid_argument("HoughConfig: resolutions must be positive");
        if (n_peaks < 1)
            throw std::invalid_argument("HoughConfig: n_peaks must be >= 1");
    }
};

struct HoughAccumulator {
    int rho_bins = 0;
    int theta_bins = 0;
    int rho_bin_min = 0;  // signed bin index of row 0; offset_px = rho_bin_min * rho_res
    double rho_res_px = 0.0;
    double theta_min_deg = 0.0;
    double theta_res_deg = 0.0;
    std::vector<long> bins;  // [rho][theta]

    long at(int r, int t) const { return bins[static_cast<size_t>(r) * theta_bins + t]; }
    long& at(int r, int t) { return bins[static_cast<size_t>(r) * theta_bins + t]; }

    double rho_of_row(int r) const { return (r + rho_bin_min) * rho_res_px; }
    double theta_of_col(int t) const { return theta_min_deg + t * theta_res_deg; }

    long total_votes() const {
        long s = 0;
        for (long v : bins) s += v;
        return s;
    }
};

struct HoughPeak {
    double rho_px = 0.0;
    double theta_deg = 0.0;
    long votes = 0;
};

struct PointD {
    double x = 0.0;
    double y = 0.0;
};

struct LineSegment {
    PointD p1;  // lower projection parameter end
    PointD p2;
    double theta_deg = 0.0;
    double rho_px = 0.0;
    long support = 0;

    const PointD& lower_endpoint() const { return p1.y >= p2.y ? p1 : p2; }
    double length() const { return std::hypot(p2.x - p1.x, p2.y - p1.y); }
};

inline double deg_to_rad(double d) { return d * M_PI / 180.0; }

/// Accumulates one vote per (point, theta bin) at round(rho / rho_res).
inline HoughAccumulator hough_vote(const std::vector<PixelPoint>& points,
                                   const HoughConfig& cfg) {
    cfg.validate();
    if (points.empty())
        throw std::invalid_argument("hough_vote: empty point set");

    const int tb = cfg.theta_bin_count();
    std::vector<double> cos_t(tb), sin_t(tb);
    for (int t = 0; t < tb; ++t) {
        const double th = deg_to_rad(cfg.theta_of_bin(t));
        cos_t[t] = std::cos(th);
        sin_t[t] = std::sin(th);
    }

    auto rho_bin = [&](const PixelPoint& p, int t) {
        const double rho = p.x * cos_t[t] + p.y * sin_t[t];
        return static_cast<int>(std::lround(rho / cfg.rho_res_px));
    };

    int bin_min = rho_bin(points[0], 0);
    int bin_max = bin_min;
    for (const auto& p : points) {
        for (int t = 0; t < tb; ++t) {
            const int b = rho_bin(p, t);
            bin_min = std::min(bin_min, b);
            bin_max = std::max(bin_max, b);
        }
    }

    HoughAccumulator acc;
    acc.theta_bins = tb;
    acc.rho_bins = bin_max - bin_min + 1;
    acc.rho_bin_min = bin_min;
    acc.rho_res_px = cfg.rho_res_px;
    acc.theta_min_deg = cfg.theta_min_deg;
    acc.theta_res_deg = cfg.theta_res_deg;
    acc.bins.assign(static_cast<size_t>(acc.rho_bins) * tb, 0);

    for (const auto& p : points)
        for (int t = 0; t < tb; ++t)
            ++acc.at(rho_bin(p, t) - bin_min, t);
    return acc;
}

/**
 * Up to n_peaks accumulator maxima in descending vote order, suppressing the
 * 3x3 bin neighbourhood around each accepted peak. Ties break toward smaller
 * rho, then smaller theta.
 */
inline std::vector<HoughPeak> find_peaks(const HoughAccumulator& acc, const HoughConfig& cfg) {
    if (acc.bins.empty())
        throw std::invalid_argument("find_peaks: empty accumulator");

    std::vector<long> work = acc.bins;
    auto w = [&](int r, int t) -> long& { return work[static_cast<size_t>(r) * acc.theta_bins + t]; };

    std::vector<HoughPeak> peaks;
    for (int n = 0; n < cfg.n_peaks; ++n) {
        long best = 0;
        int br = -1, bt = -1;
        for (int r = 0; r < acc.rho_bins; ++r)
            for (int t = 0; t < acc.theta_bins; ++t)
                if (w(r, t) > best) {  // strict: scan order resolves ties
                    best = w(r, t);
                    br = r;
                    bt = t;
                }
        if (br < 0) break;

        peaks.push_back({acc.rho_of_row(br), acc.theta_of_col(bt), best});
        for (int dr = -1; dr <= 1; ++dr)
            for (int dt = -1; dt <= 1; ++dt) {
                const int r = br + dr, t = bt + dt;
                if (r >= 0 && r < acc.rho_bins && t >= 0 && t < acc.theta_bins) w(r, t) = 0;
            }
    }
    return peaks;
}

/**
 * For each peak, gathers the points within rho_res of the line, orders them
 * along the line direction, splits where consecutive gaps exceed max_gap and
 * keeps runs at least min_seg_len long. Segment endpoints are the extreme
 * supporting points projected onto the peak line.
 */
inline std::vector<LineSegment> extract_segments(const std::vector<PixelPoint>& points,
                                                 const std::vector<HoughPeak>& peaks,
                                                 const HoughConfig& cfg) {
    if (peaks.empty())
        throw std::invalid_argument("extract_segments: no peaks");

    std::vector<LineSegment> segments;
    for (const auto& peak : peaks) {
        const double th = deg_to_rad(peak.theta_deg);
        const double c = std::cos(th), s = std::sin(th);

        std::vector<double> ts;
        for (const auto& p : points) {
            const double rho = p.x * c + p.y * s;
            if (std::abs(rho - peak.rho_px) <= cfg.rho_res_px)
                ts.push_back(-p.x * s + p.y * c);
        }
        if (ts.empty()) continue;
        std::sort(ts.begin(), ts.end());

        size_t run_start = 0;
        for (size_t i = 1; i <= ts.size(); ++i) {
            const bool split = i == ts.size() || ts[i] - ts[i - 1] > cfg.max_gap_px;
            if (!split) continue;
            const double t0 = ts[run_start], t1 = ts[i - 1];
            if (t1 - t0 >= cfg.min_seg_len_px) {
                LineSegment seg;
                seg.theta_deg = peak.theta_deg;
                seg.rho_px = peak.rho_px;
                seg.support = static_cast<long>(i - run_start);
                seg.p1 = {peak.rho_px * c - t0 * s, peak.rho_px * s + t0 * c};
                seg.p2 = {peak.rho_px * c - t1 * s, peak.rho_px * s + t1 * c};
                segments.push_back(seg);
            }
            run_start = i;
        }
    }
    return segments;
}

}  // namespace laminascope
