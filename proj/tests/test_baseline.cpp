// Template matching: Pearson map against a naive windowed oracle, affine
// invariance, lamina picking with the exclusion radius, and LF localization.

#include <gtest/gtest.h>

#include <random>

#include "laminascope/phantom.hpp"
#include "laminascope/template_match.hpp"

using namespace laminascope;

namespace {

Image random_image(int w, int h, uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    Image img(w, h);
    for (double& v : img.data) v = dist(rng);
    return img;
}

// naive per-window Pearson correlation
Image pearson_oracle(const Image& img, const Image& tpl) {
    const int tw = tpl.width, th = tpl.height;
    const double n = static_cast<double>(tpl.size());
    double tm = 0.0;
    for (double v : tpl.data) tm += v;
    tm /= n;

    Image out(img.width, img.height, 0.0);
    for (int y = 0; y + th <= img.height; ++y)
        for (int x = 0; x + tw <= img.width; ++x) {
            double wm = 0.0;
            for (int ty = 0; ty < th; ++ty)
                for (int tx = 0; tx < tw; ++tx) wm += img.at(x + tx, y + ty);
            wm /= n;
            double num = 0.0, vw = 0.0, vt = 0.0;
            for (int ty = 0; ty < th; ++ty)
                for (int tx = 0; tx < tw; ++tx) {
                    const double dw = img.at(x + tx, y + ty) - wm;
                    const double dt = tpl.at(tx, ty) - tm;
                    num += dw * dt;
                    vw += dw * dw;
                    vt += dt * dt;
                }
            if (vw > 0.0 && vt > 0.0) out.at(x + tw / 2, y + th / 2) = num / std::sqrt(vw * vt);
        }
    return out;
}

}  // namespace

TEST(Templates, RenderedTemplatesAreNormalized) {
    for (const Image& tpl : {render_lamina_template(LaminaTemplate{}),
                             render_lf_template(LfTemplate{})}) {
        double mean = 0.0;
        for (double v : tpl.data) mean += v;
        mean /= tpl.size();
        double var = 0.0;
        for (double v : tpl.data) var += (v - mean) * (v - mean);
        var /= tpl.size();
        EXPECT_NEAR(mean, 0.0, 1e-9);
        EXPECT_NEAR(var, 1.0, 1e-9);
    }
}

TEST(MatchTemplate, SelfWindowScoresOne) {
    const Image tpl = render_lf_template(LfTemplate{12.0, 1.5});
    Image img(tpl.width + 20, tpl.height + 16, 0.3);
    const int ox = 9, oy = 7;
    for (int y = 0; y < tpl.height; ++y)
        for (int x = 0; x < tpl.width; ++x)
            img.at(ox + x, oy + y) = 0.5 + 0.1 * tpl.at(x, y);  // affine copy of the template

    const Image sim = match_template(img, tpl);
    EXPECT_NEAR(sim.at(ox + tpl.width / 2, oy + tpl.height / 2), 1.0, 1e-9);
}

TEST(MatchTemplate, NegatedWindowScoresMinusOne) {
    const Image tpl = render_lf_template(LfTemplate{12.0, 1.5});
    Image img(tpl.width + 10, tpl.height + 10, 0.5);
    for (int y = 0; y < tpl.height; ++y)
        for (int x = 0; x < tpl.width; ++x) img.at(3 + x, 4 + y) = 0.5 - 0.1 * tpl.at(x, y);

    const Image sim = match_template(img, tpl);
    EXPECT_NEAR(sim.at(3 + tpl.width / 2, 4 + tpl.height / 2), -1.0, 1e-9);
}

TEST(MatchTemplate, MatchesNaiveOracle) {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const Image img = random_image(16, 16, 500 + trial);
        Image tpl(5, 5);
        for (double& v : tpl.data) v = dist(rng);

        const Image mine = match_template(img, tpl);
        const Image oracle = pearson_oracle(img, tpl);
        for (size_t i = 0; i < mine.size(); ++i)
            ASSERT_NEAR(mine.data[i], oracle.data[i], 1e-9) << "trial " << trial;
    }
}

TEST(MatchTemplate, OracleEquivalenceOnSmallInputs) {
    for (uint32_t seed = 0; seed < 6; ++seed) {
        const Image img = random_image(32, 32, 900 + seed);
        const Image tpl = random_image(7, 9, 33 + seed);
        const Image mine = match_template(img, tpl);
        const Image oracle = pearson_oracle(img, tpl);
        for (size_t i = 0; i < mine.size(); ++i) ASSERT_NEAR(mine.data[i], oracle.data[i], 1e-9);
    }
}

TEST(MatchTemplate, FftPathAgreesWithDirect) {
    const Image img = random_image(64, 48, 77);
    const Image tpl = render_lf_template(LfTemplate{16.0, 2.0});
    const Image direct = match_template(img, tpl, false);
    const Image fast = match_template(img, tpl, true);
    for (size_t i = 0; i < direct.size(); ++i) ASSERT_NEAR(direct.data[i], fast.data[i], 1e-6);
}

TEST(MatchTemplate, InvariantUnderPositiveAffineTransform) {
    const Image img = random_image(40, 40, 15);
    const Image tpl = random_image(7, 7, 16);
    Image scaled(40, 40);
    for (size_t i = 0; i < img.size(); ++i) scaled.data[i] = 1.9 * img.data[i] + 0.3;

    const Image a = match_template(img, tpl);
    const Image b = match_template(scaled, tpl);
    for (size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a.data[i], b.data[i], 1e-6);
}

TEST(MatchTemplate, ZeroVarianceWindowScoresZero) {
    const Image img(20, 20, 0.5);
    const Image tpl = random_image(5, 5, 2);
    const Image sim = match_template(img, tpl);
    for (double v : sim.data) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(MatchTemplate, TemplateTooLargeRejected) {
    EXPECT_THROW(match_template(Image(8, 8, 0.1), Image(8, 8, 0.2)), std::invalid_argument);
}

TEST(DetectLaminae, TwoLaminae30mmApart) {
    // mm_per_px 0.5 -> 30 mm = 60 px apart, exclusion radius 40 px
    Image sim(160, 160, 0.0);
    sim.at(50, 40) = 0.9;
    sim.at(50, 100) = 0.8;

    const auto found = detect_laminae(sim, 0.5, 3);
    ASSERT_EQ(found.size(), 2u);
    EXPECT_EQ(found[0], (PixelPoint{50, 40}));   // highest similarity first
    EXPECT_EQ(found[1], (PixelPoint{50, 100}));
    const double dist = std::hypot(double(found[0].x - found[1].x),
                                   double(found[0].y - found[1].y));
    EXPECT_GE(dist * 0.5, 20.0);  // never closer than 20 mm
}

TEST(DetectLaminae, EarlyStopOnWeakSecondPeak) {
    Image sim(160, 160, 0.0);
    sim.at(80, 60) = 0.9;
    sim.at(20, 140) = 0.3;  // below half the first peak
    const auto found = detect_laminae(sim, 0.5, 3);
    ASSERT_EQ(found.size(), 1u);
    EXPECT_EQ(found[0], (PixelPoint{80, 60}));
}

TEST(DetectLaminae, ExclusionRadiusSuppressesNeighbours) {
    Image sim(160, 160, 0.0);
    sim.at(80, 80) = 0.9;
    sim.at(90, 85) = 0.85;  // inside the 40 px exclusion disk
    const auto found = detect_laminae(sim, 0.5, 3);
    ASSERT_EQ(found.size(), 1u);
}

TEST(DetectLf, ArgmaxOfDifferenceInBand) {
    Image r_lf(64, 64, 0.0), r_lam(64, 64, 0.0);
    r_lf.at(30, 40) = 0.8;   // inside the band below the lamina at row 30
    r_lf.at(30, 10) = 0.95;  // above the lamina: outside the band
    const auto lfs = detect_lf(r_lf, r_lam, {{28, 30}}, 0.5, 15.0);  // band rows 31..60
    ASSERT_EQ(lfs.size(), 1u);
    EXPECT_EQ(lfs[0], (PixelPoint{30, 40}));
}

TEST(DetectLf, IdenticalMapsTieBreakTopmost) {
    const Image r(32, 32, 0.25);
    const auto lfs = detect_lf(r, r, {{16, 10}}, 1.0, 10.0);
    ASSERT_EQ(lfs.size(), 1u);
    EXPECT_EQ(lfs[0], (PixelPoint{0, 11}));  // first band pixel in scan order
}

TEST(DetectLf, EmptyBandRejected) {
    const Image r(32, 32, 0.0);
    EXPECT_THROW(detect_lf(r, r, {{16, 31}}, 1.0, 10.0), std::invalid_argument);
    EXPECT_THROW(detect_lf(r, r, {}, 1.0, 10.0), std::invalid_argument);
    EXPECT_THROW(detect_lf(r, Image(16, 16, 0.0), {{4, 4}}, 1.0, 10.0), std::invalid_argument);
}

TEST(DetectLf, PhantomLfStripeWithinThreePixels) {
    PhantomSpec spec;
    spec.seed = 19;
    spec.speckle_sigma = 0.4;
    spec.lf_stripe = LfStripeSpec{214, 4, 0.65};
    const auto [img, truth] = render_phantom(spec);

    const Image lam_tpl = render_lamina_template(LaminaTemplate{});
    const Image lf_tpl = render_lf_template(LfTemplate{});
    const Image r_lam = match_template(img, lam_tpl);
    const Image r_lf = match_template(img, lf_tpl);

    const auto laminae = detect_laminae(r_lam, 0.15, 3);
    ASSERT_FALSE(laminae.empty());

    const auto lfs = detect_lf(r_lf, r_lam, laminae, 0.15, 15.0);
    ASSERT_FALSE(lfs.empty());
    EXPECT_NEAR(lfs[0].y, truth.lf_row + spec.lf_stripe->thickness_px / 2.0, 3.0);
}
