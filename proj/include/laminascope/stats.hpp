#pragma once

/**
 * @file stats.hpp
 * @brief Agreement statistics for paired depth measurements: RMS/MAE,
 *        Bland-Altman limits of agreement, paired t-test and a Pearson
 *        chi-square normality check.
 */

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace laminascope {

struct PairedMeasurements {
    std::vector<double> auto_mm;
    std::vector<double> manual_mm;

    void validate() const {
        if (auto_mm.size() != manual_mm.size())
            throw std::invalid_argument("PairedMeasurements: length mismatch");
        if (auto_mm.size() < 2)
            throw std::invalid_argument("PairedMeasurements: need at least 2 pairs");
        for (double v : auto_mm)
            if (!std::isfinite(v)) throw std::invalid_argument("PairedMeasurements: non-finite value");
        for (double v : manual_mm)
            if (!std::isfinite(v)) throw std::invalid_argument("PairedMeasurements: non-finite value");
    }

    std::vector<double> diffs() const {
        std::vector<double> d(auto_mm.size());
        for (size_t i = 0; i < d.size(); ++i) d[i] = auto_mm[i] - manual_mm[i];
        return d;
    }
};

namespace stats_detail {

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double sample_sd(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// Regularized incomplete beta I_x(a,b) via Lentz continued fraction.
inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-14;
    constexpr double kFpmin = 1e-300;

    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpmin) d = kFpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpmin) d = kFpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpmin) c = kFpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpmin) d = kFpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpmin) c = kFpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

inline double incbeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log(1.0 - x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0))
        return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

// Regularized lower incomplete gamma P(a,x): series for x < a+1, continued
// fraction otherwise.
inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;

    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 3e-14) break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    constexpr double kFpmin = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / kFpmin, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kFpmin) d = kFpmin;
        c = b + an / c;
        if (std::abs(c) < kFpmin) c = kFpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 3e-14) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - gln) * h;
}

// Acklam's inverse normal CDF approximation (|error| < 1.2e-9).
inline double norm_quantile(double p) {
    if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("norm_quantile: p outside (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;
    double q, r, x;
    if (p < plow) {
        q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= phigh) {
        q = p - 0.5;
        r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    return x;
}

}  // namespace stats_detail

struct AccuracyStats {
    double rms_mm = 0.0;
    double mae_mm = 0.0;
    double mean_diff_mm = 0.0;
    double sd_mm = 0.0;
    double loa_low_mm = 0.0;
    double loa_high_mm = 0.0;
};

/// RMS, mean absolute error, and Bland-Altman 95% limits of agreement
/// (mean difference +- 1.96 sample standard deviations).
inline AccuracyStats accuracy_stats(const PairedMeasurements& p) {
    p.validate();
    const auto d = p.diffs();

    AccuracyStats s;
    double sq = 0.0, abs_sum = 0.0;
    for (double x : d) {
        sq += x * x;
        abs_sum += std::abs(x);
    }
    s.rms_mm = std::sqrt(sq / static_cast<double>(d.size()));
    s.mae_mm = abs_sum / static_cast<double>(d.size());
    s.mean_diff_mm = stats_detail::mean(d);
    s.sd_mm = stats_detail::sample_sd(d);
    s.loa_low_mm = s.mean_diff_mm - 1.96 * s.sd_mm;
    s.loa_high_mm = s.mean_diff_mm + 1.96 * s.sd_mm;
    return s;
}

struct TTestResult {
    double t_stat = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

/// Two-sided paired t-test on the differences.
inline TTestResult paired_t_test(const PairedMeasurements& p) {
    p.validate();
    const auto d = p.diffs();
    const double sd = stats_detail::sample_sd(d);
    if (sd <= 0.0)
        throw std::invalid_argument("paired_t_test: zero variance of differences");

    TTestResult r;
    const double n = static_cast<double>(d.size());
    r.t_stat = stats_detail::mean(d) / (sd / std::sqrt(n));
    r.dof = static_cast<int>(d.size()) - 1;
    const double nu = static_cast<double>(r.dof);
    r.p_value = stats_detail::incbeta(nu / 2.0, 0.5, nu / (nu + r.t_stat * r.t_stat));
    return r;
}

struct ChiSquareResult {
    double chi2 = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

/**
 * Pearson chi-square normality test with equiprobable bins under the normal
 * fitted by sample mean/sd; dof = bins - 3 (two estimated parameters).
 * Requires n >= 5 * bins.
 */
inline ChiSquareResult chi_square_normality(const std::vector<double>& d, int bins) {
    if (bins < 4)
        throw std::invalid_argument("chi_square_normality: need at least 4 bins");
    if (d.size() < static_cast<size_t>(5 * bins))
        throw std::invalid_argument("chi_square_normality: need at least 5 samples per bin");

    const double m = stats_detail::mean(d);
    const double sd = stats_detail::sample_sd(d);
    if (sd <= 0.0)
        throw std::invalid_argument("chi_square_normality: zero variance");

    std::vector<double> edges(bins - 1);
    for (int k = 1; k < bins; ++k)
        edges[k - 1] = m + sd * stats_detail::norm_quantile(static_cast<double>(k) / bins);

    std::vector<long> obs(bins, 0);
    for (double x : d) {
        const auto it = std::upper_bound(edges.begin(), edges.end(), x);
        ++obs[it - edges.begin()];
    }

    const double expected = static_cast<double>(d.size()) / bins;
    ChiSquareResult r;
    for (long o : obs) r.chi2 += (o - expected) * (o - expected) / expected;
    r.dof = bins - 3;
    r.p_value = 1.0 - stats_detail::gamma_p(r.dof / 2.0, r.chi2 / 2.0);
    return r;
}

}  // namespace laminascope
