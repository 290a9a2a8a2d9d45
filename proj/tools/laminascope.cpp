/**
 * @file laminascope.cpp
 * @brief Command-line interface: lamina detection and epidural-depth
 *        measurement on paramedian ultrasound images, phantom generation,
 *        runtime benchmarking and accuracy evaluation.
 *
 * Exit codes: 0 success, 1 usage/IO error, 2 detection failure.
 */

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "laminascope/bench.hpp"
#include "laminascope/config.hpp"
#include "laminascope/image_io.hpp"
#include "laminascope/phantom.hpp"
#include "laminascope/pipeline.hpp"
#include "laminascope/result_json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConfigCliOptions {
    std::string config_path;
    std::vector<std::string> overrides;  // section.key=value
    std::optional<double> mm_per_px;
    std::optional<std::string> method;
};

void add_config_options(CLI::App* cmd, ConfigCliOptions& opts) {
    cmd->add_option("--config", opts.config_path,
                    "Config file (fallback: LAMINA_SCOPE_CONFIG environment variable)");
    cmd->add_option("--set", opts.overrides,
                    "Override a config value as section.key=value (repeatable)");
}

laminascope::PipelineConfig build_config(const ConfigCliOptions& opts) {
    laminascope::PipelineConfig cfg;

    std::string path = opts.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("LAMINA_SCOPE_CONFIG")) path = env;
    }
    if (!path.empty()) {
        std::ifstream f(path);
        if (!f) throw laminascope::ConfigError("cannot open config file: " + path);
        std::stringstream ss;
        ss << f.rdbuf();
        laminascope::apply_config_text(cfg, ss.str());
    }
    for (const std::string& kv : opts.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw laminascope::ConfigError("--set expects section.key=value, got: " + kv);
        laminascope::apply_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (opts.mm_per_px) cfg.mm_per_px = *opts.mm_per_px;
    if (opts.method) cfg.method = laminascope::parse_method(*opts.method);
    cfg.validate();
    return cfg;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw laminascope::IoError(laminascope::IoError::Code::UnwritablePath,
                                       "cannot write: " + path);
    f << text;
}

std::vector<std::string> list_frames(const std::string& dir) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = entry.path().extension().string();
        if (ext == ".pgm" || ext == ".png") files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    return files;
}

json truth_to_json(const laminascope::GroundTruth& truth, const laminascope::PhantomSpec& spec) {
    json j;
    j["size"] = spec.size;
    j["seed"] = spec.seed;
    j["probe_tilt"] = spec.probe_tilt_deg;
    j["laminae"] = json::array();
    for (const auto& lam : truth.laminae)
        j["laminae"].push_back(
            {{"lower_row", lam.lower_row}, {"lower_col", lam.lower_col}, {"angle", lam.angle_deg}});
    j["lf_row"] = truth.lf_row;

    json rle = json::array();
    for (int y = 0; y < truth.lamina_mask.height; ++y) {
        int run_start = -1;
        for (int x = 0; x <= truth.lamina_mask.width; ++x) {
            const bool on = x < truth.lamina_mask.width && truth.lamina_mask.at(x, y);
            if (on && run_start < 0) run_start = x;
            if (!on && run_start >= 0) {
                rle.push_back({y, run_start, x - run_start});
                run_start = -1;
            }
        }
    }
    j["mask_rle"] = rle;
    return j;
}

laminascope::PhantomSpec phantom_spec_from_json(const json& j) {
    laminascope::PhantomSpec spec;
    spec.laminae.clear();
    if (j.contains("size")) spec.size = j["size"];
    if (j.contains("seed")) spec.seed = j["seed"];
    if (j.contains("background")) spec.background = j["background"];
    if (j.contains("speckle_sigma")) spec.speckle_sigma = j["speckle_sigma"];
    if (j.contains("probe_tilt")) spec.probe_tilt_deg = j["probe_tilt"];
    if (j.contains("laminae")) {
        for (const auto& lj : j["laminae"]) {
            laminascope::LaminaSpec lam;
            if (lj.contains("angle")) lam.angle_deg = lj["angle"];
            if (lj.contains("length")) lam.length_px = lj["length"];
            if (lj.contains("thickness")) lam.thickness_px = lj["thickness"];
            if (lj.contains("row")) lam.lower_row = lj["row"];
            if (lj.contains("col")) lam.lower_col = lj["col"];
            if (lj.contains("brightness")) lam.brightness = lj["brightness"];
            spec.laminae.push_back(lam);
        }
    }
    if (spec.laminae.empty()) spec.laminae.push_back({});
    if (j.contains("lf_stripe") && !j["lf_stripe"].is_null()) {
        laminascope::LfStripeSpec lf;
        const auto& lj = j["lf_stripe"];
        if (lj.contains("row")) lf.depth_row = lj["row"];
        if (lj.contains("thickness")) lf.thickness_px = lj["thickness"];
        if (lj.contains("brightness")) lf.brightness = lj["brightness"];
        spec.lf_stripe = lf;
    }
    return spec;
}

int run_detect(const std::string& input, const std::string& out_path,
               const std::string& overlay_path, const laminascope::PipelineConfig& cfg) {
    const laminascope::Image img = laminascope::load_image(input);
    const laminascope::DetectionResult res = laminascope::detect(img, cfg);

    const std::string image_id = fs::path(input).stem().string();
    const json j = laminascope::result_to_json(res, cfg, image_id);
    if (out_path.empty())
        std::cout << j.dump(2) << "\n";
    else
        write_text(out_path, j.dump(2) + "\n");

    if (!overlay_path.empty())
        laminascope::save_image(laminascope::render_overlay(img, res), overlay_path);

    if (res.status != laminascope::DetectStatus::Ok) {
        std::cerr << "detection failed: " << laminascope::status_name(res.status) << "\n";
        return 2;
    }
    return 0;
}

int run_detect_seq(const std::string& input_dir, const std::string& out_path,
                   const laminascope::PipelineConfig& cfg) {
    const auto files = list_frames(input_dir);
    if (files.empty())
        throw laminascope::IoError(laminascope::IoError::Code::MissingFile,
                                   "no .pgm/.png frames in " + input_dir);

    std::vector<laminascope::Image> frames;
    for (const auto& f : files) frames.push_back(laminascope::load_image(f));
    const auto results = laminascope::detect_sequence(frames, cfg);

    json arr = json::array();
    bool any_failed = false;
    for (size_t i = 0; i < results.size(); ++i) {
        arr.push_back(laminascope::result_to_json(results[i], cfg,
                                                  fs::path(files[i]).stem().string()));
        if (results[i].status != laminascope::DetectStatus::Ok) any_failed = true;
    }
    if (out_path.empty())
        std::cout << arr.dump(2) << "\n";
    else
        write_text(out_path, arr.dump(2) + "\n");
    return any_failed ? 2 : 0;
}

int run_eval(const std::string& results_dir, const std::string& manual_csv,
             const std::string& out_path, const std::string& ba_path) {
    std::map<std::string, double> manual;
    {
        std::ifstream f(manual_csv);
        if (!f) throw laminascope::IoError(laminascope::IoError::Code::MissingFile,
                                           "cannot open manual CSV: " + manual_csv);
        std::string line;
        while (std::getline(f, line)) {
            const auto comma = line.find(',');
            if (comma == std::string::npos) continue;
            const std::string id = line.substr(0, comma);
            try {
                manual[id] = std::stod(line.substr(comma + 1));
            } catch (...) {
                continue;  // header or malformed row
            }
        }
    }

    laminascope::PairedMeasurements pairs;
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(results_dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
        std::ifstream f(entry.path());
        json j;
        try {
            f >> j;
        } catch (...) {
            continue;
        }
        if (!j.contains("status") || j["status"] != "ok") continue;
        const std::string id =
            j.contains("image_id") ? j["image_id"].get<std::string>() : entry.path().stem().string();
        const auto it = manual.find(id);
        if (it == manual.end()) continue;
        pairs.auto_mm.push_back(j["depth_mm"].get<double>());
        pairs.manual_mm.push_back(it->second);
        ids.push_back(id);
    }

    if (pairs.auto_mm.size() < 2)
        throw laminascope::ConfigError("eval: need at least 2 matched (result, manual) pairs");

    const auto stats = laminascope::accuracy_stats(pairs);
    std::cout << laminascope::format_accuracy_table(stats, pairs.auto_mm.size());

    json out;
    out["n"] = pairs.auto_mm.size();
    out["rms_mm"] = stats.rms_mm;
    out["mae_mm"] = stats.mae_mm;
    out["mean_diff_mm"] = stats.mean_diff_mm;
    out["sd_mm"] = stats.sd_mm;
    out["loa_low_mm"] = stats.loa_low_mm;
    out["loa_high_mm"] = stats.loa_high_mm;

    try {
        const auto tt = laminascope::paired_t_test(pairs);
        std::cout << "Paired t-test: t = " << tt.t_stat << ", dof = " << tt.dof
                  << ", p = " << tt.p_value << "\n";
        out["t_test"] = {{"t", tt.t_stat}, {"dof", tt.dof}, {"p", tt.p_value}};
    } catch (const std::exception& e) {
        std::cout << "Paired t-test: skipped (" << e.what() << ")\n";
        out["t_test"] = nullptr;
    }

    const auto diffs = pairs.diffs();
    if (diffs.size() >= 20) {
        const int bins = std::min<int>(8, static_cast<int>(diffs.size() / 5));
        try {
            const auto cs = laminascope::chi_square_normality(diffs, bins);
            std::cout << "Chi-square normality: chi2 = " << cs.chi2 << ", dof = " << cs.dof
                      << ", p = " << cs.p_value << "\n";
            out["chi_square"] = {{"chi2", cs.chi2}, {"dof", cs.dof}, {"p", cs.p_value}};
        } catch (const std::exception& e) {
            std::cout << "Chi-square normality: skipped (" << e.what() << ")\n";
            out["chi_square"] = nullptr;
        }
    } else {
        std::cout << "Chi-square normality: skipped (needs >= 20 pairs)\n";
        out["chi_square"] = nullptr;
    }

    if (!out_path.empty()) write_text(out_path, out.dump(2) + "\n");

    if (!ba_path.empty()) {
        std::ostringstream csv;
        csv << "image_id,mean_mm,diff_mm\n";
        for (size_t i = 0; i < pairs.auto_mm.size(); ++i)
            csv << ids[i] << "," << 0.5 * (pairs.auto_mm[i] + pairs.manual_mm[i]) << ","
                << pairs.auto_mm[i] - pairs.manual_mm[i] << "\n";
        write_text(ba_path, csv.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"laminascope: lamina detection and epidural-space depth in paramedian"
                 " lumbar ultrasound"};
    app.require_subcommand(1);

    // detect
    auto* detect_cmd = app.add_subcommand("detect", "Detect the lamina and measure depth");
    ConfigCliOptions detect_opts;
    std::string detect_input, detect_out, detect_overlay;
    add_config_options(detect_cmd, detect_opts);
    detect_cmd->add_option("--input", detect_input, "Input image (.pgm or .png)")->required();
    detect_cmd->add_option("--out", detect_out, "Result JSON path (default: stdout)");
    detect_cmd->add_option("--overlay", detect_overlay, "Overlay image output path");
    detect_cmd->add_option("--mm-per-px", detect_opts.mm_per_px, "Millimetres per pixel");
    detect_cmd->add_option("--method", detect_opts.method, "main|alternative|baseline");

    // detect-seq
    auto* seq_cmd = app.add_subcommand("detect-seq", "Detect over a directory of frames");
    ConfigCliOptions seq_opts;
    std::string seq_input, seq_out;
    add_config_options(seq_cmd, seq_opts);
    seq_cmd->add_option("--input", seq_input, "Directory of frames (lexicographic order)")
        ->required();
    seq_cmd->add_option("--out", seq_out, "Result JSON array path (default: stdout)");
    seq_cmd->add_option("--mm-per-px", seq_opts.mm_per_px, "Millimetres per pixel");
    seq_cmd->add_option("--method", seq_opts.method, "main|alternative|baseline");

    // phantom
    auto* ph_cmd = app.add_subcommand("phantom", "Render a synthetic lamina phantom");
    std::string ph_out, ph_truth, ph_spec_path;
    laminascope::PhantomSpec ph;
    double ph_angle = 32.0, ph_length = 110.0, ph_thickness = 12.0, ph_brightness = 0.85;
    int ph_row = 180, ph_col = 120;
    int ph_lf_row = -1, ph_lf_thickness = 4;
    double ph_lf_brightness = 0.6;
    ph_cmd->add_option("--out", ph_out, "Output image (.pgm or .png)")->required();
    ph_cmd->add_option("--truth", ph_truth, "Ground-truth sidecar JSON (default: <out>.truth.json)");
    ph_cmd->add_option("--spec", ph_spec_path, "Phantom spec JSON (overrides the flags below)");
    ph_cmd->add_option("--seed", ph.seed, "PRNG seed");
    ph_cmd->add_option("--size", ph.size, "Image size in pixels");
    ph_cmd->add_option("--background", ph.background, "Background intensity");
    ph_cmd->add_option("--speckle-sigma", ph.speckle_sigma, "Rayleigh speckle scale (0 = none)");
    ph_cmd->add_option("--probe-tilt", ph.probe_tilt_deg, "Beam-frame tilt added to the angle");
    ph_cmd->add_option("--angle", ph_angle, "Lamina angle in degrees");
    ph_cmd->add_option("--length", ph_length, "Lamina length in pixels");
    ph_cmd->add_option("--thickness", ph_thickness, "Lamina thickness in pixels");
    ph_cmd->add_option("--row", ph_row, "Lamina lower endpoint row");
    ph_cmd->add_option("--col", ph_col, "Lamina lower endpoint column");
    ph_cmd->add_option("--brightness", ph_brightness, "Lamina brightness");
    ph_cmd->add_option("--lf-row", ph_lf_row, "LF stripe row (-1 = no stripe)");
    ph_cmd->add_option("--lf-thickness", ph_lf_thickness, "LF stripe thickness");
    ph_cmd->add_option("--lf-brightness", ph_lf_brightness, "LF stripe brightness");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Benchmark method runtimes");
    ConfigCliOptions bench_opts;
    std::string bench_image, bench_methods = "main,alternative,baseline", bench_out;
    int bench_repeats = 5;
    add_config_options(bench_cmd, bench_opts);
    bench_cmd->add_option("--image", bench_image, "Benchmark image")->required();
    bench_cmd->add_option("--methods", bench_methods, "Comma-separated method list");
    bench_cmd->add_option("--repeats", bench_repeats, "Repeats per method (>= 3)");
    bench_cmd->add_option("--out", bench_out, "Report JSON path");
    bench_cmd->add_option("--mm-per-px", bench_opts.mm_per_px, "Millimetres per pixel");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Accuracy statistics vs manual measurements");
    std::string eval_results, eval_manual, eval_out, eval_ba;
    eval_cmd->add_option("--results", eval_results, "Directory of result JSONs")->required();
    eval_cmd->add_option("--manual", eval_manual, "CSV with columns image_id,manual_mm")
        ->required();
    eval_cmd->add_option("--out", eval_out, "Report JSON path");
    eval_cmd->add_option("--ba", eval_ba, "Bland-Altman scatter CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (detect_cmd->parsed())
            return run_detect(detect_input, detect_out, detect_overlay, build_config(detect_opts));

        if (seq_cmd->parsed())
            return run_detect_seq(seq_input, seq_out, build_config(seq_opts));

        if (ph_cmd->parsed()) {
            laminascope::PhantomSpec spec;
            if (!ph_spec_path.empty()) {
                std::ifstream f(ph_spec_path);
                if (!f) throw laminascope::IoError(laminascope::IoError::Code::MissingFile,
                                                   "cannot open spec: " + ph_spec_path);
                json j;
                f >> j;
                spec = phantom_spec_from_json(j);
            } else {
                spec = ph;
                spec.laminae = {{ph_angle, ph_length, ph_thickness, ph_row, ph_col, ph_brightness}};
                if (ph_lf_row >= 0)
                    spec.lf_stripe = laminascope::LfStripeSpec{ph_lf_row, ph_lf_thickness,
                                                               ph_lf_brightness};
            }
            auto [img, truth] = laminascope::render_phantom(spec);
            laminascope::save_image(img, ph_out);
            const std::string truth_path = ph_truth.empty() ? ph_out + ".truth.json" : ph_truth;
            write_text(truth_path, truth_to_json(truth, spec).dump(2) + "\n");
            return 0;
        }

        if (bench_cmd->parsed()) {
            const auto cfg = build_config(bench_opts);
            const laminascope::Image img = laminascope::load_image(bench_image);
            std::vector<laminascope::Method> methods;
            std::stringstream ss(bench_methods);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) methods.push_back(laminascope::parse_method(item));
            const auto rows = laminascope::benchmark(methods, img, cfg, bench_repeats);
            std::cout << laminascope::format_bench_table(rows);
            if (!bench_out.empty())
                write_text(bench_out, laminascope::bench_to_json(rows).dump(2) + "\n");
            return 0;
        }

        if (eval_cmd->parsed())
            return run_eval(eval_results, eval_manual, eval_out, eval_ba);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
