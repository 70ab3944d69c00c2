#ifndef SBA_TESTS_SUPPORT_HPP
#define SBA_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "sba/measure.hpp"

namespace testing {

// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double m = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, (i + 1) / m - f, f - i / m});
    }
    return d;
}

inline double phi_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Regularized lower incomplete gamma P(a, x) by series / continued fraction.
inline double gamma_p(double a, double x) {
    if (x <= 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double term = 1.0 / a, sum = term;
        for (int k = 1; k < 1000; ++k) {
            term *= x / (a + k);
            sum += term;
            if (term < sum * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - lg) * h;
}

// Inverse-Gamma(shape, rate) CDF.
inline double inv_gamma_cdf(double x, double shape, double rate) {
    return x <= 0.0 ? 0.0 : 1.0 - gamma_p(shape, rate / x);
}

// Composite Simpson rule with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 2000) {
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

struct RandomDiscrete {
    std::vector<double> atoms;    // sorted, distinct
    std::vector<double> weights;  // sum to one
};

inline RandomDiscrete random_discrete(std::mt19937_64& rng, int k) {
    std::uniform_real_distribution<double> loc(-10.0, 10.0), w(0.05, 1.0);
    RandomDiscrete out;
    while (static_cast<int>(out.atoms.size()) < k) {
        const double x = loc(rng);
        if (std::none_of(out.atoms.begin(), out.atoms.end(), [&](double a) { return std::abs(a - x) < 1e-3; }))
            out.atoms.push_back(x);
    }
    std::sort(out.atoms.begin(), out.atoms.end());
    double total = 0.0;
    for (int i = 0; i < k; ++i) total += out.weights.emplace_back(w(rng));
    for (double& v : out.weights) v /= total;
    // Make the sum exact to rounding.
    double s = 0.0;
    for (int i = 0; i + 1 < k; ++i) s += out.weights[i];
    out.weights.back() = 1.0 - s;
    return out;
}

// Random mixture of atoms and uniform segments on the real line.
inline sba::AnalyticMeasure random_analytic(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> count(1, 5);
    std::uniform_real_distribution<double> loc(-5.0, 5.0), len(0.1, 3.0), w(0.1, 1.0), coin(0.0, 1.0);
    const int k = count(rng);
    std::vector<double> ws;
    double total = 0.0;
    for (int i = 0; i < k; ++i) total += ws.emplace_back(w(rng));
    double s = 0.0;
    for (int i = 0; i + 1 < k; ++i) s += (ws[i] /= total);
    ws.back() = 1.0 - s;
    std::vector<sba::WeightedComponent> parts;
    for (int i = 0; i < k; ++i) {
        const double a = loc(rng);
        parts.push_back({ws[i], coin(rng) < 0.5 ? sba::MeasureComponent::point(a)
                                                 : sba::MeasureComponent::uniform(a, a + len(rng))});
    }
    return sba::AnalyticMeasure(sba::Domain::real_line(), std::move(parts));
}

}  // namespace testing

#endif  // SBA_TESTS_SUPPORT_HPP
