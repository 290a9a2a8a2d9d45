#pragma once

/**
 * @file fft.hpp
 * @brief Radix-2 FFT and frequency-domain filtering of images.
 *
 * Images are reflect-padded to power-of-two dimensions before transforming;
 * transfer grids live on the padded grid in standard FFT index order (DC at
 * index 0, frequency u/P for u <= P/2, (u-P)/P above).
 */

#include <complex>
#include <stdexcept>
#include <vector>

#include "laminascope/image.hpp"

namespace laminascope {

using cplx = std::complex<double>;

/// Complex-valued grid, same layout conventions as Image.
struct ComplexGrid {
    int width = 0;
    int height = 0;
    std::vector<cplx> data;

    ComplexGrid() = default;
    ComplexGrid(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h) {}

    cplx& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    cplx at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
};

namespace fft_detail {

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

inline void fft_1d(cplx* a, int n, bool inverse, const std::vector<cplx>& twiddle) {
    // bit reversal
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const int step = n / len;
        const int half = len / 2;
        for (int i = 0; i < n; i += len) {
            for (int k = 0; k < half; ++k) {
                cplx w = twiddle[static_cast<size_t>(k) * step];
                if (inverse) w = std::conj(w);
                const cplx u = a[i + k];
                const cplx v = a[i + k + half] * w;
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
}

inline std::vector<cplx> make_twiddle(int n) {
    std::vector<cplx> tw(n / 2);
    for (int k = 0; k < n / 2; ++k) {
        const double ang = -2.0 * M_PI * k / n;
        tw[k] = cplx(std::cos(ang), std::sin(ang));
    }
    return tw;
}

}  // namespace fft_detail

inline int next_pow2(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// In-place 2-D FFT. Inverse includes the 1/(W*H) scaling so that
/// ifft2(fft2(x)) == x.
inline void fft2_inplace(ComplexGrid& g, bool inverse) {
    if (!fft_detail::is_pow2(g.width) || !fft_detail::is_pow2(g.height))
        throw std::invalid_argument("fft2: dimensions must be powers of two");

    const auto tw_row = fft_detail::make_twiddle(g.width);
    for (int y = 0; y < g.height; ++y)
        fft_detail::fft_1d(&g.data[static_cast<size_t>(y) * g.width], g.width, inverse, tw_row);

    // columns via transpose buffer (keeps the inner transform contiguous)
    std::vector<cplx> col(static_cast<size_t>(g.height));
    const auto tw_col = fft_detail::make_twiddle(g.height);
    for (int x = 0; x < g.width; ++x) {
        for (int y = 0; y < g.height; ++y) col[y] = g.at(x, y);
        fft_detail::fft_1d(col.data(), g.height, inverse, tw_col);
        for (int y = 0; y < g.height; ++y) g.at(x, y) = col[y];
    }

    if (inverse) {
        const double scale = 1.0 / (static_cast<double>(g.width) * g.height);
        for (cplx& v : g.data) v *= scale;
    }
}

inline ComplexGrid fft2(const Image& img) {
    ComplexGrid g(img.width, img.height);
    for (size_t i = 0; i < img.size(); ++i) g.data[i] = img.data[i];
    fft2_inplace(g, false);
    return g;
}

/// Extends an image to (pw, ph) by reflection; original content at (0,0).
inline Image pad_reflect(const Image& img, int pw, int ph) {
    if (pw < img.width || ph < img.height)
        throw std::invalid_argument("pad_reflect: target smaller than image");
    Image out(pw, ph);
    for (int y = 0; y < ph; ++y) {
        const int sy = Image::reflect_index(y, img.height);
        for (int x = 0; x < pw; ++x)
            out.at(x, y) = img.at(Image::reflect_index(x, img.width), sy);
    }
    return out;
}

inline int padded_width(const Image& img) { return next_pow2(img.width); }
inline int padded_height(const Image& img) { return next_pow2(img.height); }

/// Multiplies the padded image spectrum by a real transfer grid and returns
/// the real part cropped back to the original size.
inline Image filter_frequency(const Image& img, const Image& transfer) {
    const int pw = padded_width(img);
    const int ph = padded_height(img);
    if (transfer.width != pw || transfer.height != ph)
        throw std::invalid_argument("filter_frequency: transfer grid must match padded dimensions");

    ComplexGrid g = fft2(pad_reflect(img, pw, ph));
    for (size_t i = 0; i < g.data.size(); ++i) g.data[i] *= transfer.data[i];
    fft2_inplace(g, true);

    Image out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            out.at(x, y) = g.at(x, y).real();
    return out;
}

/// Normalized frequency coordinate of FFT index u on an n-point grid,
/// in cycles per pixel, range (-0.5, 0.5].
inline double fft_freq(int u, int n) {
    return (u <= n / 2 ? u : u - n) / static_cast<double>(n);
}

}  // namespace laminascope
