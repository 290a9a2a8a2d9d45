#pragma once

/**
 * @file image.hpp
 * @brief Grayscale image container, convolution kernels and spatial filtering.
 *
 * Intensities are stored as doubles in the nominal range [0,1]; 8-bit I/O
 * maps 0 -> 0.0 and 255 -> 1.0 exactly (see image_io.hpp).
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace laminascope {

enum class BorderMode { Replicate, Reflect };

struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> data;  // row-major, data[y * width + x]

    Image() = default;
    Image(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {
        if (w <= 0 || h <= 0)
            throw std::invalid_argument("Image: dimensions must be positive");
    }

    size_t size() const { return data.size(); }

    double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }

    /// Pixel access with out-of-range coordinates resolved by the border mode.
    double at_bordered(int x, int y, BorderMode border) const {
        if (!in_bounds(x, y)) {
            switch (border) {
                case BorderMode::Replicate:
                    x = std::clamp(x, 0, width - 1);
                    y = std::clamp(y, 0, height - 1);
                    break;
                case BorderMode::Reflect:
                    x = reflect_index(x, width);
                    y = reflect_index(y, height);
                    break;
            }
        }
        return at(x, y);
    }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }

    static int reflect_index(int i, int n) {
        if (n == 1) return 0;
        const int period = 2 * n;
        i = ((i % period) + period) % period;
        return i < n ? i : period - 1 - i;
    }
};

/// Convolution kernel; both dimensions must be odd so the centre is well defined.
struct Kernel {
    int width = 0;
    int height = 0;
    std::vector<double> weights;  // row-major

    Kernel(int w, int h, std::vector<double> wts)
        : width(w), height(h), weights(std::move(wts)) {
        if (w <= 0 || h <= 0 || w % 2 == 0 || h % 2 == 0)
            throw std::invalid_argument("Kernel: dimensions must be positive and odd");
        if (weights.size() != static_cast<size_t>(w) * h)
            throw std::invalid_argument("Kernel: weight count does not match dimensions");
    }

    double at(int x, int y) const { return weights[static_cast<size_t>(y) * width + x]; }

    double weight_sum() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
};

/// 2-D convolution in the image-filtering sense (the kernel slides as a
/// window, so an impulse reproduces the kernel mirrored about its centre).
/// Same-size output.
inline Image convolve(const Image& img, const Kernel& k,
                      BorderMode border = BorderMode::Replicate) {
    if (k.width > img.width || k.height > img.height)
        throw std::invalid_argument("convolve: kernel larger than image");

    const int rx = k.width / 2;
    const int ry = k.height / 2;
    Image out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double sum = 0.0;
            for (int ky = -ry; ky <= ry; ++ky) {
                for (int kx = -rx; kx <= rx; ++kx) {
                    const double w = k.at(rx + kx, ry + ky);
                    sum += w * img.at_bordered(x + kx, y + ky, border);
                }
            }
            out.at(x, y) = sum;
        }
    }
    return out;
}

inline Image clamp01(Image img) {
    for (double& v : img.data) v = std::clamp(v, 0.0, 1.0);
    return img;
}

inline double min_value(const Image& img) {
    return *std::min_element(img.data.begin(), img.data.end());
}

inline double max_value(const Image& img) {
    return *std::max_element(img.data.begin(), img.data.end());
}

inline double mean_value(const Image& img) {
    double s = 0.0;
    for (double v : img.data) s += v;
    return s / static_cast<double>(img.size());
}

/// Sliding-window box mean with the window clamped to the image bounds,
/// so a constant input stays constant up to the borders.
inline Image box_mean(const Image& img, int window) {
    if (window < 1 || window % 2 == 0)
        throw std::invalid_argument("box_mean: window must be odd and >= 1");
    const int r = window / 2;
    const int w = img.width, h = img.height;

    // summed-area table with one row/col of zero padding
    std::vector<double> sat(static_cast<size_t>(w + 1) * (h + 1), 0.0);
    auto S = [&](int x, int y) -> double& {
        return sat[static_cast<size_t>(y) * (w + 1) + x];
    };
    for (int y = 1; y <= h; ++y)
        for (int x = 1; x <= w; ++x)
            S(x, y) = img.at(x - 1, y - 1) + S(x - 1, y) + S(x, y - 1) - S(x - 1, y - 1);

    Image out(w, h);
    for (int y = 0; y < h; ++y) {
        const int y0 = std::max(0, y - r), y1 = std::min(h - 1, y + r);
        for (int x = 0; x < w; ++x) {
            const int x0 = std::max(0, x - r), x1 = std::min(w - 1, x + r);
            const double sum = S(x1 + 1, y1 + 1) - S(x0, y1 + 1) - S(x1 + 1, y0) + S(x0, y0);
            out.at(x, y) = sum / ((x1 - x0 + 1) * (y1 - y0 + 1));
        }
    }
    return out;
}

}  // namespace laminascope
