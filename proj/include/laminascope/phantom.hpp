#pragma once

/**
 * @file phantom.hpp
 * @brief Synthetic paramedian lamina phantom with ground truth.
 *
 * Renders bright diagonal lamina bands (plus an optional ligamentum-flavum
 * stripe) on a uniform background, then applies spatially correlated
 * multiplicative Rayleigh speckle. The nominal lamina angle is mapped into
 * the beam frame by a probe-tilt offset, modelling the oblique insonation of
 * the paramedian view. Fully deterministic under a fixed seed.
 */

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "laminascope/image.hpp"
#include "laminascope/morphology.hpp"

namespace laminascope {

struct LaminaSpec {
    double angle_deg = 32.0;   // nominal inclination, (0, 90)
    double length_px = 110.0;
    double thickness_px = 12.0;
    int lower_row = 180;       // lowest point of the band
    int lower_col = 120;
    double brightness = 0.85;
};

struct LfStripeSpec {
    int depth_row = 0;
    int thickness_px = 4;
    double brightness = 0.6;
};

struct PhantomSpec {
    int size = 256;
    std::vector<LaminaSpec> laminae{LaminaSpec{}};
    std::optional<LfStripeSpec> lf_stripe;
    double speckle_sigma = 0.8;  // Rayleigh scale; 0 renders noiseless
    double background = 0.22;
    double probe_tilt_deg = 8.0;
    uint64_t seed = 1;
};

struct GroundTruth {
    struct Lamina {
        int lower_row = 0;
        int lower_col = 0;
        double angle_deg = 0.0;
    };
    std::vector<Lamina> laminae;
    BinaryImage lamina_mask;  // union of all lamina cores
    int lf_row = -1;
};

namespace phantom_detail {

struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    // splitmix64
    uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform() {  // [0, 1)
        return (next() >> 11) * (1.0 / 9007199254740992.0);
    }

    double rayleigh(double sigma) {
        const double u = uniform();
        return sigma * std::sqrt(-2.0 * std::log(1.0 - u));
    }
};

inline double segment_distance(double px, double py, double ax, double ay, double bx,
                               double by) {
    const double abx = bx - ax, aby = by - ay;
    const double len2 = abx * abx + aby * aby;
    double t = len2 > 0 ? ((px - ax) * abx + (py - ay) * aby) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(ax + t * abx - px, ay + t * aby - py);
}

}  // namespace phantom_detail

/// Renders the phantom and its ground truth. Same spec + seed -> identical bits.
inline std::pair<Image, GroundTruth> render_phantom(const PhantomSpec& spec) {
    if (spec.size < 16) throw std::invalid_argument("render_phantom: size too small");

    Image img(spec.size, spec.size, spec.background);
    GroundTruth truth;
    truth.lamina_mask = BinaryImage(spec.size, spec.size);

    for (const auto& lam : spec.laminae) {
        if (lam.angle_deg <= 0.0 || lam.angle_deg >= 90.0)
            throw std::invalid_argument("render_phantom: lamina angle must lie in (0, 90)");

        // band direction in the beam frame, rising to the upper right
        const double beta = (lam.angle_deg + spec.probe_tilt_deg) * M_PI / 180.0;
        const double ux = std::sin(beta), uy = -std::cos(beta);
        const double half = lam.thickness_px / 2.0;

        // capsule positioned so its lowest boundary point (the bottom of the
        // lower end cap) is exactly the configured lower endpoint
        const double ax = static_cast<double>(lam.lower_col);
        const double ay = lam.lower_row - half;
        const double bx = ax + ux * lam.length_px;
        const double by = ay + uy * lam.length_px;

        if (ax - half < 0 || ay - half < 0 || bx + half >= spec.size || by - half < 0 ||
            lam.lower_row >= spec.size || by + half >= spec.size || bx - half < 0)
            throw std::invalid_argument("render_phantom: lamina extends outside the frame");

        for (int y = 0; y < spec.size; ++y) {
            for (int x = 0; x < spec.size; ++x) {
                const double d = phantom_detail::segment_distance(x, y, ax, ay, bx, by);
                if (d <= half) {
                    img.at(x, y) = std::max(img.at(x, y), lam.brightness);
                    truth.lamina_mask.set(x, y, true);
                } else if (d <= half + 0.5) {  // half-pixel anti-alias skirt
                    const double t = (half + 0.5 - d) / 0.5;
                    const double v = spec.background + (lam.brightness - spec.background) * t;
                    img.at(x, y) = std::max(img.at(x, y), v);
                }
            }
        }
        truth.laminae.push_back({lam.lower_row, lam.lower_col, lam.angle_deg});
    }

    if (spec.lf_stripe) {
        const auto& lf = *spec.lf_stripe;
        if (lf.depth_row < 0 || lf.depth_row + lf.thickness_px > spec.size)
            throw std::invalid_argument("render_phantom: LF stripe outside the frame");
        for (int y = lf.depth_row; y < lf.depth_row + lf.thickness_px; ++y)
            for (int x = 0; x < spec.size; ++x)
                img.at(x, y) = std::max(img.at(x, y), lf.brightness);
        truth.lf_row = lf.depth_row;
    }

    if (spec.speckle_sigma > 0.0) {
        phantom_detail::Rng rng(spec.seed);
        Image field(spec.size, spec.size);
        for (double& v : field.data) v = rng.rayleigh(spec.speckle_sigma);
        field = box_mean(field, 3);  // correlate the speckle
        for (size_t i = 0; i < img.size(); ++i)
            img.data[i] = std::clamp(img.data[i] * field.data[i], 0.0, 1.0);
    }
    return {std::move(img), std::move(truth)};
}

}  // namespace laminascope
