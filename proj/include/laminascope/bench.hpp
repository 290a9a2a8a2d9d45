#pragma once

/**
 * @file bench.hpp
 * @brief Runtime benchmark across detection methods, reported in the same
 *        row layout as the method-comparison table (phase symmetry,
 *        morphological dilations, threshold and edge map, Hough transform,
 *        template matching, total), plus text-report formatting for the
 *        accuracy statistics.
 */

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "laminascope/pipeline.hpp"
#include "laminascope/stats.hpp"

namespace laminascope {

struct BenchRow {
    Method method = Method::Main;
    bool ok = false;
    std::string status;
    // median seconds per stage; stages a method does not run stay at 0
    double phase_symmetry = 0.0;
    double dilations = 0.0;
    double threshold_edge = 0.0;  // thresholding + edge map + contour/RDP prep
    double hough = 0.0;
    double template_matching = 0.0;
    double total = 0.0;  // median of per-repeat stage sums (despeckle excluded)
};

namespace bench_detail {

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace bench_detail

/**
 * Runs each method `repeats` times on the image (serially, as timing
 * validity demands) and reports the median wall time per stage. The shared
 * despeckle preprocessing is excluded from the totals so methods are
 * compared on their own work.
 */
inline std::vector<BenchRow> benchmark(const std::vector<Method>& methods, const Image& img,
                                       const PipelineConfig& base_cfg, int repeats) {
    if (repeats < 3)
        throw std::invalid_argument("benchmark: need at least 3 repeats");

    std::vector<BenchRow> rows;
    for (Method m : methods) {
        PipelineConfig cfg = base_cfg;
        cfg.method = m;

        BenchRow row;
        row.method = m;
        std::vector<double> ps, dil, edge, hough, tm, tot;
        bool failed = false;
        for (int r = 0; r < repeats && !failed; ++r) {
            const DetectionResult res = detect(img, cfg);
            row.status = status_name(res.status);
            if (res.status != DetectStatus::Ok) {
                failed = true;
                break;
            }
            const auto& t = res.timings;
            ps.push_back(t.phasesym);
            dil.push_back(t.morphology);
            edge.push_back(t.edge + t.rdp);
            hough.push_back(t.hough);
            tm.push_back(t.template_matching);
            tot.push_back(t.phasesym + t.morphology + t.edge + t.rdp + t.hough +
                          t.template_matching);
        }
        if (!failed) {
            row.ok = true;
            row.phase_symmetry = bench_detail::median(ps);
            row.dilations = bench_detail::median(dil);
            row.threshold_edge = bench_detail::median(edge);
            row.hough = bench_detail::median(hough);
            row.template_matching = bench_detail::median(tm);
            row.total = bench_detail::median(tot);
        }
        rows.push_back(row);
    }
    return rows;
}

inline std::string format_bench_table(const std::vector<BenchRow>& rows) {
    std::ostringstream os;
    os << std::left << std::setw(26) << "Function";
    for (const auto& r : rows) os << std::right << std::setw(20) << method_name(r.method);
    os << "\n";

    auto line = [&](const std::string& name, auto getter) {
        os << std::left << std::setw(26) << name;
        for (const auto& r : rows) {
            os << std::right << std::setw(20);
            if (!r.ok) {
                os << r.status;
            } else {
                const double v = getter(r);
                if (v <= 0.0) {
                    os << "-";
                } else {
                    std::ostringstream cell;
                    cell << std::fixed << std::setprecision(4) << v;
                    os << cell.str();
                }
            }
        }
        os << "\n";
    };

    line("Phase symmetry", [](const BenchRow& r) { return r.phase_symmetry; });
    line("Morphological dilations", [](const BenchRow& r) { return r.dilations; });
    line("Threshold and edge map", [](const BenchRow& r) { return r.threshold_edge; });
    line("Hough transform", [](const BenchRow& r) { return r.hough; });
    line("Template matching", [](const BenchRow& r) { return r.template_matching; });
    os << std::left << std::setw(26) << "Total";
    for (const auto& r : rows) {
        os << std::right << std::setw(20);
        if (!r.ok) {
            os << r.status;
        } else {
            std::ostringstream cell;
            cell << std::fixed << std::setprecision(4) << r.total;
            os << cell.str();
        }
    }
    os << "\n";
    return os.str();
}

inline nlohmann::json bench_to_json(const std::vector<BenchRow>& rows) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row;
        row["method"] = method_name(r.method);
        row["ok"] = r.ok;
        row["status"] = r.status;
        row["phase_symmetry_s"] = r.phase_symmetry;
        row["morphological_dilations_s"] = r.dilations;
        row["threshold_and_edge_map_s"] = r.threshold_edge;
        row["hough_transform_s"] = r.hough;
        row["template_matching_s"] = r.template_matching;
        row["total_s"] = r.total;
        j.push_back(row);
    }
    return j;
}

/// Accuracy report in the agreement-table layout.
inline std::string format_accuracy_table(const AccuracyStats& s, size_t n_pairs) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3);
    os << "Pairs:                                " << n_pairs << "\n";
    os << "RMS error (mm):                       " << s.rms_mm << "\n";
    os << "Mean absolute error (mm):             " << s.mae_mm << "\n";
    os << "Mean difference (mm):                 " << s.mean_diff_mm << "\n";
    os << "Bland-Altman 95% limits of agreement: " << s.loa_low_mm << " to " << s.loa_high_mm
       << " mm\n";
    return os.str();
}

}  // namespace laminascope
