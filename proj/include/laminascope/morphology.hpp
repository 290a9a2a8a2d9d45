#pragma once

/**
 * @file morphology.hpp
 * @brief Grayscale dilation/erosion, Otsu thresholding and the lamina
 *        shape-adjustment chain (two square dilations, thresholding, disk
 *        erosion).
 */

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "laminascope/image.hpp"

namespace laminascope {

struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> bits;

    BinaryImage() = default;
    BinaryImage(int w, int h, bool fill = false)
        : width(w), height(h), bits(static_cast<size_t>(w) * h, fill ? 1 : 0) {}

    bool at(int x, int y) const { return bits[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }

    size_t count() const {
        size_t n = 0;
        for (uint8_t b : bits) n += b;
        return n;
    }

    Image to_image() const {
        Image img(width, height);
        for (size_t i = 0; i < bits.size(); ++i) img.data[i] = bits[i] ? 1.0 : 0.0;
        return img;
    }
};

enum class SeShape { Square, Disk };

/**
 * Structuring element with origin at floor(size/2) in both axes (for even
 * sizes that is the upper-left cell of the central 2x2). Disk membership:
 * cell offset (dx,dy) from the origin is active iff dx^2+dy^2 <= (size/2)^2.
 */
struct StructuringElement {
    SeShape shape = SeShape::Square;
    int size = 0;
    int origin = 0;                // same in x and y
    std::vector<uint8_t> mask;     // row-major, size x size

    static StructuringElement square(int size) {
        StructuringElement se;
        se.shape = SeShape::Square;
        se.init(size);
        std::fill(se.mask.begin(), se.mask.end(), 1);
        return se;
    }

    static StructuringElement disk(int size) {
        StructuringElement se;
        se.shape = SeShape::Disk;
        se.init(size);
        const double r2 = (size / 2.0) * (size / 2.0);
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x) {
                const double dx = x - se.origin, dy = y - se.origin;
                se.mask[static_cast<size_t>(y) * size + x] = (dx * dx + dy * dy <= r2) ? 1 : 0;
            }
        return se;
    }

    bool active(int x, int y) const { return mask[static_cast<size_t>(y) * size + x] != 0; }

private:
    void init(int n) {
        if (n < 1) throw std::invalid_argument("StructuringElement: size must be >= 1");
        size = n;
        origin = n / 2;
        mask.assign(static_cast<size_t>(n) * n, 0);
    }
};

namespace morph_detail {

enum class Op { Dilate, Erode };

inline Image apply(const Image& img, const StructuringElement& se, Op op) {
    if (se.size > img.width || se.size > img.height)
        throw std::invalid_argument("morphology: structuring element larger than image");

    Image out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double ext = (op == Op::Dilate) ? -1.0 : 2.0;
            for (int sy = 0; sy < se.size; ++sy) {
                for (int sx = 0; sx < se.size; ++sx) {
                    if (!se.active(sx, sy)) continue;
                    const int dx = sx - se.origin;
                    const int dy = sy - se.origin;
                    // dilation reads p - d (Minkowski sum), erosion p + d
                    const int px = (op == Op::Dilate) ? x - dx : x + dx;
                    const int py = (op == Op::Dilate) ? y - dy : y + dy;
                    const double v = img.at_bordered(px, py, BorderMode::Replicate);
                    if (op == Op::Dilate) {
                        if (v > ext) ext = v;
                    } else {
                        if (v < ext) ext = v;
                    }
                }
            }
            out.at(x, y) = ext;
        }
    }
    return out;
}

}  // namespace morph_detail

/// Grayscale dilation: max of the input over the SE neighbourhood.
inline Image dilate(const Image& img, const StructuringElement& se) {
    return morph_detail::apply(img, se, morph_detail::Op::Dilate);
}

/// Grayscale erosion: min of the input over the SE neighbourhood.
inline Image erode(const Image& img, const StructuringElement& se) {
    return morph_detail::apply(img, se, morph_detail::Op::Erode);
}

inline BinaryImage erode(const BinaryImage& bin, const StructuringElement& se) {
    // booleans treated as {0,1} grayscale, same kernel machinery
    const Image eroded = erode(bin.to_image(), se);
    BinaryImage out(bin.width, bin.height);
    for (size_t i = 0; i < eroded.size(); ++i) out.bits[i] = eroded.data[i] >= 0.5 ? 1 : 0;
    return out;
}

struct OtsuError : std::domain_error {
    using std::domain_error::domain_error;
};

/**
 * Otsu's threshold over a 256-bin histogram, maximizing the between-class
 * variance; ties broken toward the lower threshold. Returns the cut level in
 * [0,1] placed between the winning bin and the next one.
 * Throws OtsuError when the image has fewer than two occupied bins.
 */
inline double otsu_threshold(const Image& img) {
    std::vector<double> hist(256, 0.0);
    for (double v : img.data) {
        const int bin = std::clamp(static_cast<int>(std::lround(v * 255.0)), 0, 255);
        hist[bin] += 1.0;
    }
    int occupied = 0;
    for (double c : hist)
        if (c > 0) ++occupied;
    if (occupied < 2)
        throw OtsuError("otsu_threshold: image has no intensity contrast");

    const double total = static_cast<double>(img.size());
    double sum_all = 0.0;
    for (int i = 0; i < 256; ++i) sum_all += i * hist[i];

    double w0 = 0.0, sum0 = 0.0, best = -1.0;
    int best_k = 0;
    for (int k = 0; k < 255; ++k) {
        w0 += hist[k];
        sum0 += k * hist[k];
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (between > best) {  // strict: first (lowest) k wins ties
            best = between;
            best_k = k;
        }
    }
    return (best_k + 0.5) / 255.0;
}

/// Pixel is set iff intensity >= gain * level.
inline BinaryImage binarize(const Image& img, double level, double gain = 0.9) {
    if (level <= 0.0 || level >= 1.0)
        throw std::invalid_argument("binarize: level must lie in (0,1)");
    const double cut = gain * level;
    BinaryImage out(img.width, img.height);
    for (size_t i = 0; i < img.size(); ++i) out.bits[i] = img.data[i] >= cut ? 1 : 0;
    return out;
}

/// Disk radius a*sqrt(2)*sin(77 deg), rounded to the nearest integer pixel.
inline int erosion_radius(double a) {
    if (a <= 0.0) throw std::invalid_argument("erosion_radius: a must be positive");
    constexpr double kAngleDeg = 77.0;
    const double r = a * std::sqrt(2.0) * std::sin(kAngleDeg * M_PI / 180.0);
    return static_cast<int>(std::lround(r));
}

enum class Se2Mode {
    Literal,  // disk sized exactly as configured
    Derived,  // disk diameter derived from the se1 size via erosion_radius()
};

struct ShapeChainParams {
    int se1_size = 8;
    Se2Mode se2_mode = Se2Mode::Derived;
    int se2_size = 10;       // used in Literal mode
    double otsu_gain = 0.9;

    int effective_se2_size() const {
        return se2_mode == Se2Mode::Derived ? erosion_radius(se1_size) : se2_size;
    }
};

/**
 * Lamina shape-adjustment chain: two dilations with a square SE grow the
 * bone structures and square the lower lamina corner, thresholding binarizes
 * them, and a disk erosion recovers the original lamina size.
 * Propagates OtsuError for images without contrast.
 */
inline BinaryImage lamina_shape_chain(const Image& img, const ShapeChainParams& p = {}) {
    const auto se1 = StructuringElement::square(p.se1_size);
    const auto se2 = StructuringElement::disk(p.effective_se2_size());

    const Image dilated = dilate(dilate(img, se1), se1);
    const double level = otsu_threshold(dilated);
    const BinaryImage bin = binarize(dilated, level, p.otsu_gain);
    return erode(bin, se2);
}

}  // namespace laminascope
