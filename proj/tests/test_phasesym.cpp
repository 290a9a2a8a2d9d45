// Log-Gabor quadrature responses and phase-symmetry behaviour on analytic
// inputs and the phantom.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "laminascope/phasesym.hpp"
#include "laminascope/phantom.hpp"

using namespace laminascope;

namespace {

Image gaussian_bar(int size, double row, double width, double amp, double bg) {
    Image img(size, size, bg);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            img.at(x, y) = bg + amp * std::exp(-(y - row) * (y - row) / (2.0 * width * width));
    return img;
}

double row_mean(const Image& img, int row) {
    double s = 0.0;
    for (int x = 0; x < img.width; ++x) s += img.at(x, row);
    return s / img.width;
}

}  // namespace

TEST(LogGabor, UnityAtCentreFrequency) {
    EXPECT_DOUBLE_EQ(log_gabor_radial(0.1, 0.1, 0.55), 1.0);
    EXPECT_DOUBLE_EQ(log_gabor_radial(0.25, 0.25, 0.75), 1.0);
    EXPECT_DOUBLE_EQ(log_gabor_radial(0.0, 0.1, 0.55), 0.0);  // no DC response
    EXPECT_LT(log_gabor_radial(0.4, 0.1, 0.55), 0.2);
}

TEST(LogGaborResponses, ConstantImageGivesZeroResponses) {
    const LogGaborBank bank;
    const auto resp = log_gabor_responses(Image(64, 64, 0.5), bank);
    ASSERT_EQ(resp.even.size(), static_cast<size_t>(bank.scales * 3));
    for (const auto& grid : resp.even)
        for (double v : grid.data) ASSERT_NEAR(v, 0.0, 1e-9);
    for (const auto& grid : resp.odd)
        for (double v : grid.data) ASSERT_NEAR(v, 0.0, 1e-9);
}

TEST(LogGaborResponses, EvenSymmetricInputDrivesEvenPart) {
    // cosine along y at the scale-2 centre frequency, peak (symmetry point)
    // at the middle row; the 90-degree orientation filter sees it
    LogGaborBank bank;
    const int n = 128;
    const double lambda = bank.min_wavelength * std::pow(bank.scale_mult, 2);
    Image img(n, n);
    const double y0 = 64.0;
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
            img.at(x, y) = 0.5 + 0.4 * std::cos(2.0 * M_PI * (y - y0) / lambda);

    const auto resp = log_gabor_responses(img, bank);
    const int idx_scale2 = 0 * bank.scales + 2;  // orientation 90 is first
    const double even = resp.even[idx_scale2].at(64, static_cast<int>(y0));
    const double odd = resp.odd[idx_scale2].at(64, static_cast<int>(y0));
    EXPECT_GT(std::abs(even), 0.05);
    EXPECT_LT(std::abs(odd), 0.15 * std::abs(even));
}

TEST(PhaseSymmetry, ConstantImageScoresZero) {
    const LogGaborBank bank;
    NoiseModel noise;
    const Image ps = phase_symmetry(Image(64, 64, 0.3), bank, noise);
    for (double v : ps.data) EXPECT_NEAR(v, 0.0, 1e-6);
}

TEST(PhaseSymmetry, OutputWithinUnitInterval) {
    PhantomSpec spec;
    spec.seed = 5;
    const auto [img, truth] = render_phantom(spec);
    const LogGaborBank bank;
    NoiseModel noise;
    const Image ps = phase_symmetry(img, bank, noise);
    for (double v : ps.data) {
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
    }
    EXPECT_GE(noise.mu, 0.0);
    EXPECT_GE(noise.sigma, 0.0);
}

TEST(PhaseSymmetry, RidgeScoresAboveSurroundings) {
    const Image img = gaussian_bar(128, 64.0, 3.0, 0.5, 0.2);
    const LogGaborBank bank;
    NoiseModel noise;
    const Image ps = phase_symmetry(img, bank, noise);

    const double on_ridge = row_mean(ps, 64);
    const double off_ridge = 0.5 * (row_mean(ps, 24) + row_mean(ps, 104));
    EXPECT_GE(on_ridge - off_ridge, 0.3);
}

TEST(PhaseSymmetry, InvariantToConstantOffset) {
    PhantomSpec spec;
    spec.seed = 9;
    auto [img, truth] = render_phantom(spec);
    for (double& v : img.data) v = 0.2 + 0.5 * v;  // keep room for the offset

    Image shifted = img;
    for (double& v : shifted.data) v += 0.2;

    const LogGaborBank bank;
    NoiseModel n1, n2;
    const Image a = phase_symmetry(img, bank, n1);
    const Image b = phase_symmetry(shifted, bank, n2);
    for (size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a.data[i], b.data[i], 1e-6);
}

TEST(PhaseSymmetry, RaisingNoiseThresholdNeverIncreasesScore) {
    PhantomSpec spec;
    spec.seed = 13;
    const auto [img, truth] = render_phantom(spec);
    const LogGaborBank bank;

    NoiseModel low;
    low.k_sigma = 2.0;
    NoiseModel high;
    high.k_sigma = 6.0;
    const Image a = phase_symmetry(img, bank, low);
    const Image b = phase_symmetry(img, bank, high);
    for (size_t i = 0; i < a.size(); ++i) ASSERT_LE(b.data[i], a.data[i] + 1e-12);
}

TEST(PhaseSymmetry, RemovingDominantOrientationNeverIncreasesScore) {
    // horizontal bar: spectrum along the vertical axis, the 90-degree
    // orientation dominates
    const Image img = gaussian_bar(128, 64.0, 3.0, 0.5, 0.2);

    LogGaborBank full;
    LogGaborBank stripped;
    stripped.orientations_deg = {120.0, 150.0};

    NoiseModel n1, n2;
    const Image with_all = phase_symmetry(img, full, n1);
    const Image without = phase_symmetry(img, stripped, n2);
    for (int x = 10; x < 118; ++x)
        EXPECT_LE(without.at(x, 64), with_all.at(x, 64) + 0.05) << x;
}

TEST(PhaseSymmetry, RidgeMassConcentratesOnLamina) {
    PhantomSpec spec;
    spec.seed = 21;
    spec.speckle_sigma = 0.0;
    const auto [img, truth] = render_phantom(spec);

    const LogGaborBank bank;
    NoiseModel noise;
    const Image ps = phase_symmetry(img, bank, noise);

    // the ridge is the thresholded PS structure; its support is wider than
    // the band itself by the coarse-scale filter width, so compare against
    // the mask with a 12 px halo
    const double cut = 0.5 * otsu_threshold(ps);
    constexpr int kHalo = 12;

    double on_mass = 0.0, total = 0.0;
    for (int y = 0; y < ps.height; ++y)
        for (int x = 0; x < ps.width; ++x) {
            if (ps.at(x, y) < cut) continue;
            total += ps.at(x, y);
            bool near = false;
            for (int dy = -kHalo; dy <= kHalo && !near; ++dy)
                for (int dx = -kHalo; dx <= kHalo; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx >= 0 && nx < ps.width && ny >= 0 && ny < ps.height &&
                        truth.lamina_mask.at(nx, ny))
                        near = true;
                }
            if (near) on_mass += ps.at(x, y);
        }
    ASSERT_GT(total, 0.0);
    EXPECT_GE(on_mass / total, 0.6);
}

TEST(PhaseSymmetry, TinyImageRejected) {
    EXPECT_THROW(log_gabor_responses(Image(8, 8, 0.5), LogGaborBank{}), std::invalid_argument);
}
