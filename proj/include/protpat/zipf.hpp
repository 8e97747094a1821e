#pragma once

// Zipf (zeta) distribution of pattern sizes: P[Z = k] = k^-s / zeta(s), k >= 1.

#include "protpat/error.hpp"
#include "protpat/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace protpat {

/// Riemann zeta for real s > 1: the first 20 terms summed directly, the tail
/// from 21 on by Euler-Maclaurin through the B10 correction. Relative error is
/// below 1e-14 for all s > 1.
inline double zeta(double s)
{
    if (!(s > 1.0) || !std::isfinite(s)) throw std::domain_error("zeta requires a finite s > 1");

    constexpr int direct_terms = 20;
    // B_{2j} / (2j)! for j = 1..5
    constexpr std::array<double, 5> bernoulli_over_factorial{
        1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0, 1.0 / 47900160.0};

    double sum = 0.0;
    for (int k = direct_terms; k >= 1; --k) sum += std::pow(static_cast<double>(k), -s);

    const double n = direct_terms + 1;
    double tail = std::pow(n, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(n, -s);
    // Rising factorial s(s+1)...(s+2j-2) times n^(-s-2j+1), built up term by term.
    double rising = s;
    double power = std::pow(n, -s - 1.0);
    for (std::size_t j = 0; j < bernoulli_over_factorial.size(); ++j) {
        tail += bernoulli_over_factorial[j] * rising * power;
        rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
        power /= n * n;
    }
    return sum + tail;
}

class ZipfModel {
public:
    explicit ZipfModel(double s) : s_(s)
    {
        if (!(s > 1.0) || !std::isfinite(s)) throw std::invalid_argument("Zipf exponent must be a finite s > 1");
        zeta_s_ = zeta(s);
    }

    double s() const noexcept { return s_; }
    double zeta_s() const noexcept { return zeta_s_; }

    double pmf(long long k) const
    {
        if (k < 1) throw std::invalid_argument("Zipf support starts at k = 1");
        return std::pow(static_cast<double>(k), -s_) / zeta_s_;
    }

    double log_likelihood(std::span<const int> sizes) const
    {
        double sum_log = 0.0;
        for (int k : sizes) sum_log += std::log(static_cast<double>(k));
        return -static_cast<double>(sizes.size()) * std::log(zeta_s_) - s_ * sum_log;
    }

private:
    double s_;
    double zeta_s_;
};

inline double pmf(const ZipfModel& model, long long k) { return model.pmf(k); }

/// PEPSI is the fitted exponent itself: the magnitude of the log-log slope.
inline double pepsi(const ZipfModel& model) { return model.s(); }

/// Probability of a pattern with at least `cutoff` lines.
inline double p_large(const ZipfModel& model, int cutoff = 4)
{
    if (cutoff < 1) throw std::invalid_argument("cutoff must be >= 1");
    double below = 0.0;
    for (int k = 1; k < cutoff; ++k) below += model.pmf(k);
    return 1.0 - below;
}

/// Inverse-CDF draw, capped at k_max.
template <typename Gen>
int sample_size(const ZipfModel& model, Gen& gen, int k_max)
{
    if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
    const double u = uniform_open01(gen);
    double cdf = 0.0;
    for (int k = 1; k < k_max; ++k) {
        cdf += model.pmf(k);
        if (cdf >= u) return k;
    }
    return k_max;
}

struct ZipfFit {
    ZipfModel model;
    std::size_t sample_size = 0;
    double log_likelihood = 0.0;
    double standard_error = 0.0;  // from the observed Fisher information
};

namespace detail {

/// Second derivative of ln zeta at s, which is Var[ln Z] and the per-sample Fisher information.
inline double log_zeta_curvature(double s)
{
    const double h = std::min(1e-3, (s - 1.0) / 4.0);
    return (std::log(zeta(s + h)) - 2.0 * std::log(zeta(s)) + std::log(zeta(s - h))) / (h * h);
}

}  // namespace detail

/// Maximum-likelihood exponent with lower cutoff 1, by golden-section search
/// on (1.0001, 20] to 1e-4 in s. The log-likelihood is concave in s.
inline ZipfFit fit_mle(std::span<const int> sizes)
{
    if (sizes.size() < 2) throw DegenerateDataError("Zipf fit needs at least 2 observations");
    double sum_log = 0.0;
    bool any_above_one = false;
    for (int k : sizes) {
        if (k < 1) throw std::invalid_argument("pattern sizes must be >= 1");
        any_above_one |= k > 1;
        sum_log += std::log(static_cast<double>(k));
    }
    if (!any_above_one) throw DegenerateDataError("no finite MLE: every pattern has one line");

    const double n = static_cast<double>(sizes.size());
    auto loglik = [&](double s) { return -n * std::log(zeta(s)) - s * sum_log; };

    constexpr double lo_bound = 1.0001, hi_bound = 20.0, tolerance = 1e-4;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = lo_bound, hi = hi_bound;
    double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
    double f1 = loglik(x1), f2 = loglik(x2);
    while (hi - lo > tolerance) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = loglik(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = loglik(x1);
        }
    }
    const double s = 0.5 * (lo + hi);
    ZipfFit fit{ZipfModel(s), sizes.size(), loglik(s), 0.0};
    fit.standard_error = 1.0 / std::sqrt(n * detail::log_zeta_curvature(s));
    return fit;
}

/// Structured text: one `key = value` per line, pmf row to 5 decimals.
inline std::string format_fit_report(const ZipfFit& fit)
{
    char buf[128];
    std::string out;
    std::snprintf(buf, sizeof buf, "s = %.4f\n", fit.model.s());
    out += buf;
    std::snprintf(buf, sizeof buf, "pepsi = %.4f\n", pepsi(fit.model));
    out += buf;
    std::snprintf(buf, sizeof buf, "standard_error = %.4f\n", fit.standard_error);
    out += buf;
    out += "sample_size = " + std::to_string(fit.sample_size) + "\n";
    std::snprintf(buf, sizeof buf, "log_likelihood = %.6f\n", fit.log_likelihood);
    out += buf;
    std::snprintf(buf, sizeof buf, "p_large_4 = %.4f\n", p_large(fit.model, 4));
    out += buf;
    out += "pmf_k =";
    for (int k = 1; k <= 7; ++k) out += "       " + std::to_string(k);
    out += "\npmf   =";
    for (int k = 1; k <= 7; ++k) {
        std::snprintf(buf, sizeof buf, " %.5f", fit.model.pmf(k));
        out += buf;
    }
    out += "\n";
    return out;
}

}  // namespace protpat
