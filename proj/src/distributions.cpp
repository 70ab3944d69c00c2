#include "sba/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace sba {

double uniform_open(Rng& rng) {
    // (k + 0.5) / 2^53 never hits 0 or 1.
    const std::uint64_t k = rng() >> 11;
    return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double normal_log_pdf(double z) {
    return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi);
}

double normal_quantile(double p) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();

    // Acklam's rational approximation, relative error ~1.15e-9.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00, 2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // Halley refinement against erfc.
    const double e = x <= 0.0 ? normal_cdf(x) - p : (1.0 - p) - normal_sf(x);
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

double sample_normal(Rng& rng, double mean, double sd) {
    std::normal_distribution<double> dist(mean, sd);
    return dist(rng);
}

double sample_gamma(Rng& rng, double shape, double rate) {
    std::gamma_distribution<double> dist(shape, 1.0 / rate);
    return dist(rng);
}

double sample_inverse_gamma(Rng& rng, double shape, double rate) {
    double g = sample_gamma(rng, shape, rate);
    if (g <= std::numeric_limits<double>::min()) g = std::numeric_limits<double>::min();
    return 1.0 / g;
}

std::vector<double> sample_dirichlet(Rng& rng, std::span<const double> alpha) {
    std::vector<double> out(alpha.size());
    double total = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        out[i] = sample_gamma(rng, alpha[i], 1.0);
        total += out[i];
    }
    if (total > 0.0) {
        for (double& v : out) v /= total;
        return out;
    }
    // All gammas underflowed (tiny shapes): the limiting law is a vertex chosen
    // with probability alpha_k / sum(alpha).
    std::vector<double> logs(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) logs[i] = std::log(alpha[i]);
    std::fill(out.begin(), out.end(), 0.0);
    out[static_cast<std::size_t>(sample_log_categorical(rng, logs))] = 1.0;
    return out;
}

double log_sum_exp(std::span<const double> values) {
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : values) hi = std::max(hi, v);
    if (!std::isfinite(hi)) return hi;
    double total = 0.0;
    for (double v : values) total += std::exp(v - hi);
    return hi + std::log(total);
}

int sample_log_categorical(Rng& rng, std::span<const double> log_weights) {
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : log_weights) hi = std::max(hi, v);
    if (hi == -std::numeric_limits<double>::infinity() || std::isnan(hi)) return -1;
    double total = 0.0;
    for (double v : log_weights) total += std::exp(v - hi);
    double target = uniform_open(rng) * total;
    int last = -1;
    for (std::size_t i = 0; i < log_weights.size(); ++i) {
        if (log_weights[i] == -std::numeric_limits<double>::infinity()) continue;
        last = static_cast<int>(i);
        target -= std::exp(log_weights[i] - hi);
        if (target <= 0.0) return last;
    }
    return last;
}

}  // namespace sba
