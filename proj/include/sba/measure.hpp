#ifndef SBA_MEASURE_HPP
#define SBA_MEASURE_HPP

#include <limits>
#include <vector>

namespace sba {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Parameter space: the real line, a closed half-line or a compact interval.
struct Domain {
    double lower = -kInf;
    double upper = kInf;

    Domain() = default;
    Domain(double lo, double hi);

    static Domain real_line() { return {}; }

    bool contains(double x) const { return x >= lower && x <= upper; }
    bool bounded_below() const { return lower > -kInf; }
    bool bounded_above() const { return upper < kInf; }
    friend bool operator==(const Domain&, const Domain&) = default;
};

struct MeasureComponent {
    enum class Kind { point_mass, uniform_segment };

    Kind kind = Kind::point_mass;
    double a = 0.0;  // atom location, or segment start
    double b = 0.0;  // segment end (unused for point masses)

    static MeasureComponent point(double location);
    static MeasureComponent uniform(double from, double to);

    double mean() const;
    double lowest() const { return a; }
    double highest() const { return kind == Kind::point_mass ? a : b; }
};

struct WeightedComponent {
    double weight;
    MeasureComponent component;
};

/// Finite mixture of point masses and uniform segments with closed-form
/// CDF, partial first moments and quantiles. Immutable after construction.
class AnalyticMeasure {
public:
    /// Throws sba::Error(model) if weights do not sum to one within 1e-12,
    /// a weight is outside (0,1], or a component leaves the domain.
    AnalyticMeasure(Domain domain, std::vector<WeightedComponent> components);

    static AnalyticMeasure point_mass(double location, Domain domain = {});
    static AnalyticMeasure uniform(double from, double to);

    const Domain& domain() const { return domain_; }
    const std::vector<WeightedComponent>& components() const { return components_; }

    /// Right-continuous CDF, G((-inf, x]).
    double cdf(double x) const;
    /// Left limit G((-inf, x)).
    double cdf_left(double x) const;
    /// G((a, b]).
    double mass(double a, double b) const;
    /// Integral of theta over (a, b]; atoms at a excluded, atoms at b included.
    double partial_mean(double a, double b) const;
    double mean() const { return partial_mean(-kInf, kInf); }

    /// Generalized inverse inf{x : F(x) >= u}, u in (0,1).
    double quantile(double u) const;

    /// Sorted distinct atom locations and segment endpoints.
    std::vector<double> breakpoints() const;

private:
    Domain domain_;
    std::vector<WeightedComponent> components_;
};

/// G-barycenter of (a, b]. Falls back to a when the interval carries no mass;
/// with a = -inf that fallback is the domain's lower bound, and when the
/// domain is unbounded below ZeroMassUnboundedInterval is thrown.
double barycenter(const AnalyticMeasure& measure, double a, double b);

}  // namespace sba

#endif  // SBA_MEASURE_HPP
