#pragma once

/**
 * @file edgemap.hpp
 * @brief Prewitt gradients and edge-map binarization.
 */

#include <cmath>

#include "laminascope/image.hpp"
#include "laminascope/morphology.hpp"

namespace laminascope {

struct GradientField {
    Image gx;
    Image gy;
    Image magnitude;
    Image direction;  // radians, (-pi/2, pi/2], atan(Gy/Gx) convention
};

/// Horizontal Prewitt kernel: [+1 0 -1] columns replicated over three rows.
inline Kernel prewitt_gx_kernel() {
    return Kernel(3, 3, {1, 0, -1, 1, 0, -1, 1, 0, -1});
}

/// Vertical Prewitt kernel: [+1; 0; -1] rows.
inline Kernel prewitt_gy_kernel() {
    return Kernel(3, 3, {1, 1, 1, 0, 0, 0, -1, -1, -1});
}

inline GradientField prewitt(const Image& img) {
    if (img.width < 3 || img.height < 3)
        throw std::invalid_argument("prewitt: image must be at least 3x3");

    GradientField g;
    g.gx = convolve(img, prewitt_gx_kernel());
    g.gy = convolve(img, prewitt_gy_kernel());
    g.magnitude = Image(img.width, img.height);
    g.direction = Image(img.width, img.height);
    for (size_t i = 0; i < img.size(); ++i) {
        const double gx = g.gx.data[i];
        const double gy = g.gy.data[i];
        g.magnitude.data[i] = std::sqrt(gx * gx + gy * gy);
        if (gx == 0.0) {
            g.direction.data[i] = gy == 0.0 ? 0.0 : std::copysign(M_PI / 2.0, gy);
        } else {
            g.direction.data[i] = std::atan(gy / gx);
        }
    }
    return g;
}

/// Edge pixels are those with magnitude >= frac * max(magnitude).
/// A zero-gradient image yields an empty (valid) edge map.
inline BinaryImage edge_binarize(const GradientField& g, double frac = 0.2) {
    if (frac <= 0.0 || frac >= 1.0)
        throw std::invalid_argument("edge_binarize: frac must lie in (0,1)");

    const double peak = max_value(g.magnitude);
    BinaryImage out(g.magnitude.width, g.magnitude.height);
    if (peak <= 1e-12) return out;  // flat image up to rounding residue

    const double cut = frac * peak;
    for (size_t i = 0; i < g.magnitude.size(); ++i)
        out.bits[i] = g.magnitude.data[i] >= cut ? 1 : 0;
    return out;
}

}  // namespace laminascope
