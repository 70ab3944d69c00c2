#include "sba/measure.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "sba/error.hpp"

namespace sba {

namespace {

std::string describe(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

Domain::Domain(double lo, double hi) : lower(lo), upper(hi) {
    if (std::isnan(lo) || std::isnan(hi) || !(lo < hi))
        throw Error(ErrorKind::model, "domain requires lower < upper, got [" + describe(lo) +
                                          ", " + describe(hi) + "]");
}

MeasureComponent MeasureComponent::point(double location) {
    if (!std::isfinite(location))
        throw Error(ErrorKind::model, "point mass location must be finite");
    return {Kind::point_mass, location, location};
}

MeasureComponent MeasureComponent::uniform(double from, double to) {
    if (!std::isfinite(from) || !std::isfinite(to) || !(from < to))
        throw Error(ErrorKind::model, "uniform segment requires finite a < b, got [" +
                                          describe(from) + ", " + describe(to) + "]");
    return {Kind::uniform_segment, from, to};
}

double MeasureComponent::mean() const {
    return kind == Kind::point_mass ? a : 0.5 * (a + b);
}

AnalyticMeasure::AnalyticMeasure(Domain domain, std::vector<WeightedComponent> components)
    : domain_(domain), components_(std::move(components)) {
    if (components_.empty())
        throw Error(ErrorKind::model, "measure needs at least one component");
    double total = 0.0;
    for (const auto& c : components_) {
        if (!(c.weight > 0.0 && c.weight <= 1.0))
            throw Error(ErrorKind::model, "component weight must lie in (0,1], got " +
                                              describe(c.weight));
        if (!domain_.contains(c.component.lowest()) || !domain_.contains(c.component.highest()))
            throw Error(ErrorKind::model, "component support leaves the domain");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw Error(ErrorKind::model, "component weights sum to " + describe(total) + ", not 1");
}

AnalyticMeasure AnalyticMeasure::point_mass(double location, Domain domain) {
    return AnalyticMeasure(domain, {{1.0, MeasureComponent::point(location)}});
}

AnalyticMeasure AnalyticMeasure::uniform(double from, double to) {
    return AnalyticMeasure(Domain(from, to), {{1.0, MeasureComponent::uniform(from, to)}});
}

double AnalyticMeasure::cdf(double x) const {
    double total = 0.0;
    for (const auto& [w, c] : components_) {
        if (c.kind == MeasureComponent::Kind::point_mass) {
            if (c.a <= x) total += w;
        } else if (x >= c.b) {
            total += w;
        } else if (x > c.a) {
            total += w * (x - c.a) / (c.b - c.a);
        }
    }
    return std::clamp(total, 0.0, 1.0);
}

double AnalyticMeasure::cdf_left(double x) const {
    double total = 0.0;
    for (const auto& [w, c] : components_) {
        if (c.kind == MeasureComponent::Kind::point_mass) {
            if (c.a < x) total += w;
        } else if (x >= c.b) {
            total += w;
        } else if (x > c.a) {
            total += w * (x - c.a) / (c.b - c.a);
        }
    }
    return std::clamp(total, 0.0, 1.0);
}

double AnalyticMeasure::mass(double a, double b) const {
    if (!(a < b)) return 0.0;
    double total = 0.0;
    for (const auto& [w, c] : components_) {
        if (c.kind == MeasureComponent::Kind::point_mass) {
            if (c.a > a && c.a <= b) total += w;
        } else {
            const double lo = std::max(a, c.a);
            const double hi = std::min(b, c.b);
            if (hi > lo) total += w * (hi - lo) / (c.b - c.a);
        }
    }
    return total;
}

double AnalyticMeasure::partial_mean(double a, double b) const {
    if (!(a < b)) return 0.0;
    double total = 0.0;
    for (const auto& [w, c] : components_) {
        if (c.kind == MeasureComponent::Kind::point_mass) {
            if (c.a > a && c.a <= b) total += w * c.a;
        } else {
            const double lo = std::max(a, c.a);
            const double hi = std::min(b, c.b);
            if (hi > lo) total += w * (hi - lo) * 0.5 * (hi + lo) / (c.b - c.a);
        }
    }
    return total;
}

std::vector<double> AnalyticMeasure::breakpoints() const {
    std::vector<double> xs;
    for (const auto& [w, c] : components_) {
        xs.push_back(c.a);
        if (c.kind == MeasureComponent::Kind::uniform_segment) xs.push_back(c.b);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

double AnalyticMeasure::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0))
        throw Error(ErrorKind::invalid_argument, "quantile level must lie in (0,1)");
    const auto xs = breakpoints();
    double prev_x = xs.front();
    double prev_value = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double left = cdf_left(xs[k]);
        const double value = cdf(xs[k]);
        if (u <= left && k > 0) {
            // F is linear on (prev_x, xs[k]) running from prev_value to left.
            const double t = (u - prev_value) / (left - prev_value);
            return prev_x + t * (xs[k] - prev_x);
        }
        if (u <= value) return xs[k];
        prev_x = xs[k];
        prev_value = value;
    }
    return xs.back();
}

double barycenter(const AnalyticMeasure& measure, double a, double b) {
    if (a > b) throw Error(ErrorKind::invalid_argument, "barycenter requires a <= b");
    const double m = measure.mass(a, b);
    if (m > 0.0) {
        // All mass on one location: return it exactly, since w * x / w may
        // round away from x and break ties the array conditions rely on.
        std::optional<double> only;
        bool single = true;
        for (const auto& c : measure.components()) {
            const auto& p = c.component;
            if (p.kind == MeasureComponent::Kind::point_mass) {
                if (!(p.a > a && p.a <= b)) continue;
                if (only && *only != p.a) single = false;
                only = p.a;
            } else if (p.b > a && p.a < b) {
                single = false;
            }
        }
        if (single && only) return *only;
        const double c = measure.partial_mean(a, b) / m;
        // Rounding can push the ratio a hair past the interval ends.
        return std::clamp(c, std::max(a, measure.domain().lower), std::min(b, measure.domain().upper));
    }
    if (a > -kInf) return a;
    if (measure.domain().bounded_below()) return measure.domain().lower;
    throw ZeroMassUnboundedInterval("interval (-inf, " + describe(b) +
                                    "] carries no mass and the domain is unbounded below");
}

}  // namespace sba
