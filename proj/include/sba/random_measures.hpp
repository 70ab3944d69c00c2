#ifndef SBA_RANDOM_MEASURES_HPP
#define SBA_RANDOM_MEASURES_HPP

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "sba/barycenter_array.hpp"
#include "sba/distributions.hpp"
#include "sba/measure.hpp"

namespace sba {

/// Base law H_{j,l} for one odd node.
struct NodeLaw {
    enum class Kind { normal, degenerate, uniform };

    Kind kind = Kind::normal;
    double p1 = 0.0;  // normal mean | degenerate value | uniform lower
    double p2 = 1.0;  // normal sd | unused | uniform upper

    static NodeLaw normal(double mean, double sd);
    static NodeLaw degenerate(double value);
    static NodeLaw uniform(double a, double b);

    bool is_degenerate() const { return kind == Kind::degenerate; }

    double cdf(double x) const;
    double log_density(double x) const;
    /// log H((a, b]).
    double log_mass(double a, double b) const;
    /// Quantile of H restricted to (a, b] at level u in (0,1).
    double restricted_quantile(double a, double b, double u) const;
    /// CDF of H restricted to (a, b], evaluated at x in (a, b].
    double restricted_cdf(double a, double b, double x) const;

    friend bool operator==(const NodeLaw&, const NodeLaw&) = default;
};

/// Inverse-CDF draw from H restricted to (a, b]. The result lies strictly
/// inside (a, b) for continuous laws. Throws DegenerateOutsideInterval for a
/// point mass outside (a, b].
double sample_restricted(const NodeLaw& law, double a, double b, Rng& rng);

/// The collection of node laws for a depth-n array: one default law plus
/// per-node overrides keyed by (row, odd position).
class NodeLawFamily {
public:
    NodeLawFamily() : NodeLawFamily(1, Domain::real_line(), NodeLaw::normal(0.0, 1.0)) {}
    NodeLawFamily(int depth, Domain domain, NodeLaw default_law,
                  std::map<std::pair<int, long>, NodeLaw> overrides = {});

    int depth() const { return depth_; }
    const Domain& domain() const { return domain_; }
    const NodeLaw& law(int j, long l) const;
    const NodeLaw& default_law() const { return default_; }
    const std::map<std::pair<int, long>, NodeLaw>& overrides() const { return overrides_; }
    bool root_is_degenerate() const { return law(1, 1).is_degenerate(); }

    /// Same laws re-targeted at a different depth (overrides past it dropped).
    NodeLawFamily with_depth(int depth) const;

private:
    int depth_;
    Domain domain_;
    NodeLaw default_;
    std::map<std::pair<int, long>, NodeLaw> overrides_;
};

/// Log joint prior density of an array under the family, including the
/// normalizers of every restricted law.
double log_prior_density(const BarycenterArray& array, const NodeLawFamily& family);

/// Dispersion prior P_eta.
struct ScaleLaw {
    enum class Kind { inverse_gamma, gamma, log_normal };

    Kind kind = Kind::inverse_gamma;
    double p1 = 1.0;  // shape | shape | mu
    double p2 = 1.0;  // rate | rate | sigma

    static ScaleLaw inverse_gamma(double shape, double rate);
    static ScaleLaw gamma(double shape, double rate);
    static ScaleLaw log_normal(double mu, double sigma);

    double sample(Rng& rng) const;
    double log_density(double phi) const;

    friend bool operator==(const ScaleLaw&, const ScaleLaw&) = default;
};

struct JointAtom {
    double theta;
    double phi;
    double weight;
};

class JointDiscreteMeasure {
public:
    explicit JointDiscreteMeasure(std::vector<JointAtom> atoms);

    const std::vector<JointAtom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    double theta_mean() const;
    DiscreteMeasure theta_marginal() const;

private:
    std::vector<JointAtom> atoms_;
};

struct DsbaDraw {
    BarycenterArray array;
    DiscreteMeasure measure;
};

BarycenterArray sample_dsba_array(const NodeLawFamily& family, Rng& rng);
DsbaDraw sample_dsba(int n, const NodeLawFamily& family, Rng& rng);

/// A location-scale prior draw with its array and per-cell pieces kept apart,
/// as the samplers need them.
struct LocationScaleDraw {
    BarycenterArray array;
    std::vector<double> location_weights;  // 2^n cell masses
    std::vector<double> locations;         // 2^n cell barycenters
    std::vector<double> phis;              // 2^n (parsimonious) or m2 (general)
    std::vector<std::vector<double>> scale_weights;  // general only, 2^n rows

    bool general() const { return !scale_weights.empty(); }
    JointDiscreteMeasure joint() const;
};

LocationScaleDraw draw_dsbasp(int n, const NodeLawFamily& family, const ScaleLaw& scale, Rng& rng);
LocationScaleDraw draw_dsbasg(int n, const NodeLawFamily& family, const ScaleLaw& scale, int m2,
                              std::span<const double> alpha, Rng& rng);

JointDiscreteMeasure sample_dsbasp(int n, const NodeLawFamily& family, const ScaleLaw& scale, Rng& rng);
JointDiscreteMeasure sample_dsbasg(int n, const NodeLawFamily& family, const ScaleLaw& scale, int m2,
                                   std::span<const double> alpha, Rng& rng);

}  // namespace sba

#endif  // SBA_RANDOM_MEASURES_HPP
