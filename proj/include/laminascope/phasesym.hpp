#pragma once

/**
 * @file phasesym.hpp
 * @brief Log-Gabor quadrature filtering and phase symmetry.
 *
 * Phase symmetry scores even-symmetric (ridge-like) structure independently
 * of contrast: per scale and orientation the even response must dominate the
 * odd one by more than the expected noise, normalized by the local energy.
 * Bone surfaces light up as ridges.
 */

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "laminascope/fft.hpp"
#include "laminascope/image.hpp"

namespace laminascope {

struct LogGaborBank {
    int scales = 5;
    std::vector<double> orientations_deg = {90.0, 120.0, 150.0};
    double sigma_ratio = 0.55;        // k/omega0, kept constant across scales
    double lowpass_radius = 0.40;     // normalized frequency cutoff
    int lowpass_sharpness = 10;
    double min_wavelength = 3.0;
    double scale_mult = 2.1;
    double angular_sigma_mult = 1.2;  // sigma = mult * orientation spacing

    void validate() const {
        if (scales < 1) throw std::invalid_argument("LogGaborBank: scales must be >= 1");
        if (orientations_deg.empty())
            throw std::invalid_argument("LogGaborBank: need at least one orientation");
        if (sigma_ratio <= 0 || sigma_ratio >= 1)
            throw std::invalid_argument("LogGaborBank: sigma_ratio must lie in (0,1)");
    }
};

struct NoiseModel {
    double k_sigma = 2.0;
    double underestimate = 0.9;  // applied threshold is T / underestimate
    // Rayleigh-derived statistics of the noise energy, filled by phase_symmetry.
    double mu = 0.0;
    double sigma = 0.0;
};

/// Radial log-Gabor response, unity at the centre frequency omega0.
inline double log_gabor_radial(double omega, double omega0, double sigma_ratio) {
    if (omega <= 0.0) return 0.0;
    const double num = std::log(omega / omega0);
    const double den = std::log(sigma_ratio);
    return std::exp(-(num * num) / (2.0 * den * den));
}

struct QuadratureResponses {
    int width = 0;   // image (cropped) dimensions
    int height = 0;
    int scales = 0;
    int orientations = 0;
    // index = orientation * scales + scale, image-sized grids
    std::vector<Image> even;
    std::vector<Image> odd;

    const Image& e(int orient, int scale) const { return even[orient * scales + scale]; }
    const Image& o(int orient, int scale) const { return odd[orient * scales + scale]; }
};

/**
 * Even/odd log-Gabor responses per (scale, orientation): the image spectrum
 * is multiplied by the angularly weighted radial filter times the low-pass;
 * even = real part, odd = imaginary part of the complex spatial result.
 */
inline QuadratureResponses log_gabor_responses(const Image& img, const LogGaborBank& bank) {
    bank.validate();
    if (img.width < 16 || img.height < 16)
        throw std::invalid_argument("log_gabor_responses: image dimensions must be >= 16");

    const int pw = padded_width(img);
    const int ph = padded_height(img);
    const size_t n = static_cast<size_t>(pw) * ph;

    std::vector<double> radius(n), angle(n);
    for (int v = 0; v < ph; ++v) {
        const double fy = fft_freq(v, ph);
        for (int u = 0; u < pw; ++u) {
            const double fx = fft_freq(u, pw);
            radius[static_cast<size_t>(v) * pw + u] = std::hypot(fx, fy);
            angle[static_cast<size_t>(v) * pw + u] = std::atan2(fy, fx);
        }
    }

    std::vector<double> lowpass(n);
    for (size_t i = 0; i < n; ++i)
        lowpass[i] = 1.0 / (1.0 + std::pow(radius[i] / bank.lowpass_radius,
                                           2.0 * bank.lowpass_sharpness));

    // angular spacing from the configured orientation set (30 deg for the
    // default {90,120,150})
    double spacing_deg = 30.0;
    if (bank.orientations_deg.size() >= 2) {
        std::vector<double> sorted = bank.orientations_deg;
        std::sort(sorted.begin(), sorted.end());
        spacing_deg = sorted[1] - sorted[0];
    }
    const double sig = bank.angular_sigma_mult * spacing_deg * M_PI / 180.0;

    const ComplexGrid spectrum = fft2(pad_reflect(img, pw, ph));

    QuadratureResponses out;
    out.width = img.width;
    out.height = img.height;
    out.scales = bank.scales;
    out.orientations = static_cast<int>(bank.orientations_deg.size());

    for (double psi_deg : bank.orientations_deg) {
        const double psi = psi_deg * M_PI / 180.0;
        std::vector<double> angular(n);
        for (size_t i = 0; i < n; ++i) {
            double d = angle[i] - psi;
            d = std::atan2(std::sin(d), std::cos(d));
            angular[i] = std::exp(-d * d / (2.0 * sig * sig));
        }

        for (int s = 0; s < bank.scales; ++s) {
            const double f0 = 1.0 / (bank.min_wavelength * std::pow(bank.scale_mult, s));
            ComplexGrid g(pw, ph);
            for (size_t i = 0; i < n; ++i) {
                const double t =
                    log_gabor_radial(radius[i], f0, bank.sigma_ratio) * angular[i] * lowpass[i];
                g.data[i] = spectrum.data[i] * t;
            }
            fft2_inplace(g, true);

            Image ev(img.width, img.height), od(img.width, img.height);
            for (int y = 0; y < img.height; ++y)
                for (int x = 0; x < img.width; ++x) {
                    ev.at(x, y) = g.at(x, y).real();
                    od.at(x, y) = g.at(x, y).imag();
                }
            out.even.push_back(std::move(ev));
            out.odd.push_back(std::move(od));
        }
    }
    return out;
}

/**
 * Phase symmetry (Eq-style sum over scales and orientations):
 *
 *   PS(x) = sum_n floor0(|e_n(x)| - |o_n(x)| - T_n) / sum_n sqrt(e_n^2 + o_n^2 + eps)
 *
 * The noise thresholds T_n are per-scale shares of a Rayleigh noise-energy
 * estimate fitted from the smallest-scale response (median-based), divided by
 * the underestimate factor. Output lies in [0,1]. The fitted total mean and
 * deviation are reported back through the NoiseModel.
 */
inline Image phase_symmetry(const Image& img, const LogGaborBank& bank, NoiseModel& noise) {
    constexpr double kEps = 1e-4;
    const QuadratureResponses resp = log_gabor_responses(img, bank);

    Image numerator(img.width, img.height);
    Image denominator(img.width, img.height);

    const double rayleigh_mean = std::sqrt(M_PI / 2.0);
    const double rayleigh_sd = std::sqrt((4.0 - M_PI) / 2.0);

    double total_tau_sum = 0.0;

    for (int o = 0; o < resp.orientations; ++o) {
        // Rayleigh scale of the noise amplitude from the finest-scale response
        std::vector<double> amp(img.size());
        for (size_t i = 0; i < img.size(); ++i)
            amp[i] = std::hypot(resp.e(o, 0).data[i], resp.o(o, 0).data[i]);
        std::nth_element(amp.begin(), amp.begin() + amp.size() / 2, amp.end());
        const double tau = amp[amp.size() / 2] / std::sqrt(std::log(4.0));

        double total_tau = 0.0;
        for (int s = 0; s < resp.scales; ++s) {
            const double tau_s = tau * std::pow(1.0 / bank.scale_mult, s);
            total_tau += tau_s;
            const double t_s =
                (tau_s * (rayleigh_mean + noise.k_sigma * rayleigh_sd)) / noise.underestimate;

            const Image& e = resp.e(o, s);
            const Image& od = resp.o(o, s);
            for (size_t i = 0; i < img.size(); ++i) {
                const double ev = e.data[i];
                const double ov = od.data[i];
                numerator.data[i] += std::max(0.0, std::abs(ev) - std::abs(ov) - t_s);
                denominator.data[i] += std::sqrt(ev * ev + ov * ov + kEps);
            }
        }
        total_tau_sum += total_tau;
    }

    // report the fitted noise-energy statistics (averaged over orientations)
    const double mean_tau = total_tau_sum / resp.orientations;
    noise.mu = mean_tau * rayleigh_mean;
    noise.sigma = mean_tau * rayleigh_sd;

    Image ps(img.width, img.height);
    for (size_t i = 0; i < img.size(); ++i)
        ps.data[i] = numerator.data[i] / denominator.data[i];
    return ps;
}

}  // namespace laminascope
