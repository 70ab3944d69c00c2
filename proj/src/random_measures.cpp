#include "sba/random_measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sba/error.hpp"

namespace sba {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(x) - exp(y)) for x > y.
double log_diff_exp(double x, double y) {
    if (y == kNegInf) return x;
    return x + std::log1p(-std::exp(y - x));
}

double log_normal_cdf(double z) {
    const double v = normal_cdf(z);
    if (v > 0.0) return std::log(v);
    // Mills-ratio asymptote far in the lower tail.
    return normal_log_pdf(z) - std::log(-z);
}

double log_normal_sf(double z) { return log_normal_cdf(-z); }

// Keeps a continuous draw strictly inside (a, b); ties with an interval end
// would break the paired-ties condition of the array.
double strictly_inside(double x, double a, double b) {
    if (!(x > a)) x = std::nextafter(a, b);
    if (!(x < b)) x = std::nextafter(b, a);
    return x;
}

}  // namespace

NodeLaw NodeLaw::normal(double mean, double sd) {
    if (!std::isfinite(mean) || !(sd > 0.0) || !std::isfinite(sd))
        throw Error(ErrorKind::model, "normal node law needs finite mean and sd > 0");
    return {Kind::normal, mean, sd};
}

NodeLaw NodeLaw::degenerate(double value) {
    if (!std::isfinite(value)) throw Error(ErrorKind::model, "degenerate node law needs a finite value");
    return {Kind::degenerate, value, 0.0};
}

NodeLaw NodeLaw::uniform(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
        throw Error(ErrorKind::model, "uniform node law needs finite a < b");
    return {Kind::uniform, a, b};
}

double NodeLaw::cdf(double x) const {
    switch (kind) {
        case Kind::normal: return normal_cdf((x - p1) / p2);
        case Kind::degenerate: return x >= p1 ? 1.0 : 0.0;
        case Kind::uniform: return std::clamp((x - p1) / (p2 - p1), 0.0, 1.0);
    }
    return 0.0;
}

double NodeLaw::log_density(double x) const {
    switch (kind) {
        case Kind::normal: return normal_log_pdf((x - p1) / p2) - std::log(p2);
        case Kind::degenerate: return x == p1 ? 0.0 : kNegInf;
        case Kind::uniform: return (x >= p1 && x <= p2) ? -std::log(p2 - p1) : kNegInf;
    }
    return kNegInf;
}

double NodeLaw::log_mass(double a, double b) const {
    if (!(a < b)) return kNegInf;
    switch (kind) {
        case Kind::normal: {
            const double za = (a - p1) / p2;
            const double zb = (b - p1) / p2;
            if (za > 0.0) return log_diff_exp(log_normal_sf(za), log_normal_sf(zb));
            return log_diff_exp(log_normal_cdf(zb), a == -kInf ? kNegInf : log_normal_cdf(za));
        }
        case Kind::degenerate: return (p1 > a && p1 <= b) ? 0.0 : kNegInf;
        case Kind::uniform: {
            const double lo = std::max(a, p1);
            const double hi = std::min(b, p2);
            return hi > lo ? std::log((hi - lo) / (p2 - p1)) : kNegInf;
        }
    }
    return kNegInf;
}

double NodeLaw::restricted_quantile(double a, double b, double u) const {
    switch (kind) {
        case Kind::degenerate:
            if (!(p1 > a && p1 <= b)) {
                std::ostringstream os;
                os << "degenerate law at " << p1 << " lies outside (" << a << ", " << b << "]";
                throw DegenerateOutsideInterval(os.str());
            }
            return p1;
        case Kind::uniform: {
            const double lo = std::max(a, p1);
            const double hi = std::min(b, p2);
            if (!(hi > lo)) throw Error(ErrorKind::model, "uniform node law has no mass on the interval");
            return lo + u * (hi - lo);
        }
        case Kind::normal: {
            const double za = (a - p1) / p2;
            const double zb = (b - p1) / p2;
            double z;
            if (za > 0.0) {
                // Upper tail: work with survival probabilities.
                const double sa = normal_sf(za);
                const double sb = normal_sf(zb);
                z = sa > sb ? -normal_quantile(sa - u * (sa - sb)) : std::nan("");
            } else {
                const double fa = normal_cdf(za);
                const double fb = normal_cdf(zb);
                z = fb > fa ? normal_quantile(fa + u * (fb - fa)) : std::nan("");
            }
            if (std::isnan(z)) {
                // Mass below double resolution; the density is flat across such
                // an interval to the same precision.
                if (!std::isfinite(za) || !std::isfinite(zb))
                    throw Error(ErrorKind::numerical, "restricted normal has no representable mass");
                z = za + u * (zb - za);
            }
            return std::clamp(p1 + p2 * z, a, b);
        }
    }
    return std::nan("");
}

double NodeLaw::restricted_cdf(double a, double b, double x) const {
    switch (kind) {
        case Kind::degenerate: return x >= p1 ? 1.0 : 0.0;
        case Kind::uniform: {
            const double lo = std::max(a, p1);
            const double hi = std::min(b, p2);
            return hi > lo ? std::clamp((x - lo) / (hi - lo), 0.0, 1.0) : 0.0;
        }
        case Kind::normal: {
            const double za = (a - p1) / p2;
            const double zb = (b - p1) / p2;
            const double zx = (x - p1) / p2;
            double v;
            if (za > 0.0) {
                const double sa = normal_sf(za);
                v = (sa - normal_sf(zx)) / (sa - normal_sf(zb));
            } else {
                const double fa = normal_cdf(za);
                v = (normal_cdf(zx) - fa) / (normal_cdf(zb) - fa);
            }
            if (!std::isfinite(v)) v = (zx - za) / (zb - za);
            return std::clamp(v, 0.0, 1.0);
        }
    }
    return 0.0;
}

double sample_restricted(const NodeLaw& law, double a, double b, Rng& rng) {
    if (law.is_degenerate()) return law.restricted_quantile(a, b, 0.5);
    if (!(a < b)) throw Error(ErrorKind::invalid_argument, "restriction needs a < b");
    return strictly_inside(law.restricted_quantile(a, b, uniform_open(rng)), a, b);
}

NodeLawFamily::NodeLawFamily(int depth, Domain domain, NodeLaw default_law,
                             std::map<std::pair<int, long>, NodeLaw> overrides)
    : depth_(depth), domain_(domain), default_(default_law), overrides_(std::move(overrides)) {
    if (depth < 1 || depth > kMaxDepth)
        throw Error(ErrorKind::model, "family depth must lie in 1.." + std::to_string(kMaxDepth));
    if (default_.is_degenerate())
        throw Error(ErrorKind::model, "the default node law must not be degenerate");
    for (const auto& [key, law] : overrides_) {
        const auto [j, l] = key;
        if (j < 1 || j > depth + 1 || l < 1 || l > row_width(j) || l % 2 == 0)
            throw Error(ErrorKind::model, "node override (" + std::to_string(j) + "," +
                                              std::to_string(l) + ") is not an odd node of the array");
        if (law.is_degenerate() && !(j == 1 && l == 1))
            throw Error(ErrorKind::model, "degenerate laws are only allowed at the root node");
        if (law.is_degenerate() && !domain_.contains(law.p1))
            throw Error(ErrorKind::model, "degenerate root value lies outside the domain");
    }
}

const NodeLaw& NodeLawFamily::law(int j, long l) const {
    const auto it = overrides_.find({j, l});
    return it == overrides_.end() ? default_ : it->second;
}

NodeLawFamily NodeLawFamily::with_depth(int depth) const {
    std::map<std::pair<int, long>, NodeLaw> kept;
    for (const auto& [key, law] : overrides_)
        if (key.first <= depth + 1) kept.emplace(key, law);
    return NodeLawFamily(depth, domain_, default_, std::move(kept));
}

double log_prior_density(const BarycenterArray& array, const NodeLawFamily& family) {
    const NodeLaw& root = family.law(1, 1);
    double total = root.is_degenerate()
                       ? root.log_density(array.at(1, 1))
                       : root.log_density(array.at(1, 1)) -
                             root.log_mass(array.domain().lower, array.domain().upper);
    for (int j = 2; j <= array.rows(); ++j) {
        for (long p = 1; p < (1L << j); p += 2) {
            const NodeLaw& law = family.law(j, p);
            const double a = array.at(j - 1, (p - 1) / 2);
            const double b = array.at(j - 1, (p + 1) / 2);
            total += law.log_density(array.at(j, p)) - law.log_mass(a, b);
        }
    }
    return total;
}

ScaleLaw ScaleLaw::inverse_gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0)) throw Error(ErrorKind::model, "inverse-gamma needs shape, rate > 0");
    return {Kind::inverse_gamma, shape, rate};
}

ScaleLaw ScaleLaw::gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0)) throw Error(ErrorKind::model, "gamma needs shape, rate > 0");
    return {Kind::gamma, shape, rate};
}

ScaleLaw ScaleLaw::log_normal(double mu, double sigma) {
    if (!std::isfinite(mu) || !(sigma > 0.0)) throw Error(ErrorKind::model, "log-normal needs sigma > 0");
    return {Kind::log_normal, mu, sigma};
}

double ScaleLaw::sample(Rng& rng) const {
    constexpr double floor = 1e-12;
    double phi = 0.0;
    switch (kind) {
        case Kind::inverse_gamma: phi = sample_inverse_gamma(rng, p1, p2); break;
        case Kind::gamma: phi = sample_gamma(rng, p1, p2); break;
        case Kind::log_normal: phi = std::exp(sample_normal(rng, p1, p2)); break;
    }
    return std::max(phi, floor);
}

double ScaleLaw::log_density(double phi) const {
    if (!(phi > 0.0)) return kNegInf;
    switch (kind) {
        case Kind::inverse_gamma:
            return p1 * std::log(p2) - std::lgamma(p1) - (p1 + 1.0) * std::log(phi) - p2 / phi;
        case Kind::gamma:
            return p1 * std::log(p2) - std::lgamma(p1) + (p1 - 1.0) * std::log(phi) - p2 * phi;
        case Kind::log_normal: {
            const double z = (std::log(phi) - p1) / p2;
            return normal_log_pdf(z) - std::log(p2) - std::log(phi);
        }
    }
    return kNegInf;
}

JointDiscreteMeasure::JointDiscreteMeasure(std::vector<JointAtom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw Error(ErrorKind::invalid_argument, "joint measure needs at least one atom");
    double total = 0.0;
    for (const auto& a : atoms_) {
        if (!(a.phi > 0.0) || !(a.weight >= 0.0) || !std::isfinite(a.theta))
            throw Error(ErrorKind::invalid_argument, "joint atoms need finite theta, phi > 0, weight >= 0");
        total += a.weight;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw Error(ErrorKind::invalid_argument, "joint weights must sum to 1");
}

double JointDiscreteMeasure::theta_mean() const {
    double total = 0.0;
    for (const auto& a : atoms_) total += a.weight * a.theta;
    return total;
}

DiscreteMeasure JointDiscreteMeasure::theta_marginal() const {
    std::vector<double> thetas;
    std::vector<double> weights;
    for (const auto& a : atoms_) {
        thetas.push_back(a.theta);
        weights.push_back(a.weight);
    }
    return DiscreteMeasure(std::move(thetas), std::move(weights));
}

BarycenterArray sample_dsba_array(const NodeLawFamily& family, Rng& rng) {
    const int n = family.depth();
    const Domain& domain = family.domain();
    std::vector<std::vector<double>> rows;
    rows.push_back({sample_restricted(family.law(1, 1), domain.lower, domain.upper, rng)});
    for (int j = 2; j <= n + 1; ++j) {
        const auto& parent = rows.back();
        const long cells = 1L << (j - 1);
        std::vector<double> row(row_width(j));
        for (long l = 1; l <= cells; ++l) {
            const double a = l == 1 ? domain.lower : parent[l - 2];
            const double b = l == cells ? domain.upper : parent[l - 1];
            row[2 * l - 2] = sample_restricted(family.law(j, 2 * l - 1), a, b, rng);
            if (l < cells) row[2 * l - 1] = parent[l - 1];
        }
        rows.push_back(std::move(row));
    }
    return BarycenterArray(domain, std::move(rows));
}

DsbaDraw sample_dsba(int n, const NodeLawFamily& family, Rng& rng) {
    if (n != family.depth()) throw Error(ErrorKind::model, "family depth does not match n");
    auto array = sample_dsba_array(family, rng);
    auto measure = DiscreteMeasure::from_array(array);
    return {std::move(array), std::move(measure)};
}

JointDiscreteMeasure LocationScaleDraw::joint() const {
    std::vector<JointAtom> atoms;
    if (!general()) {
        for (std::size_t l = 0; l < locations.size(); ++l)
            atoms.push_back({locations[l], phis[l], location_weights[l]});
    } else {
        for (std::size_t l = 0; l < locations.size(); ++l)
            for (std::size_t k = 0; k < phis.size(); ++k)
                atoms.push_back({locations[l], phis[k], location_weights[l] * scale_weights[l][k]});
    }
    return JointDiscreteMeasure(std::move(atoms));
}

namespace {

LocationScaleDraw draw_locations(int n, const NodeLawFamily& family, Rng& rng) {
    if (n != family.depth()) throw Error(ErrorKind::model, "family depth does not match n");
    auto array = sample_dsba_array(family, rng);
    auto weights = weights_level_n(array);
    auto atoms = level_atoms(array);
    return {std::move(array), std::move(weights), std::move(atoms), {}, {}};
}

}  // namespace

LocationScaleDraw draw_dsbasp(int n, const NodeLawFamily& family, const ScaleLaw& scale, Rng& rng) {
    auto draw = draw_locations(n, family, rng);
    draw.phis.resize(draw.locations.size());
    for (double& phi : draw.phis) phi = scale.sample(rng);
    return draw;
}

LocationScaleDraw draw_dsbasg(int n, const NodeLawFamily& family, const ScaleLaw& scale, int m2,
                              std::span<const double> alpha, Rng& rng) {
    if (m2 < 1 || alpha.size() != static_cast<std::size_t>(m2))
        throw Error(ErrorKind::model, "alpha must have exactly m2 entries");
    for (double a : alpha)
        if (!(a > 0.0)) throw Error(ErrorKind::model, "alpha entries must be positive");
    auto draw = draw_locations(n, family, rng);
    draw.phis.resize(static_cast<std::size_t>(m2));
    for (double& phi : draw.phis) phi = scale.sample(rng);
    draw.scale_weights.reserve(draw.locations.size());
    for (std::size_t l = 0; l < draw.locations.size(); ++l)
        draw.scale_weights.push_back(sample_dirichlet(rng, alpha));
    return draw;
}

JointDiscreteMeasure sample_dsbasp(int n, const NodeLawFamily& family, const ScaleLaw& scale, Rng& rng) {
    return draw_dsbasp(n, family, scale, rng).joint();
}

JointDiscreteMeasure sample_dsbasg(int n, const NodeLawFamily& family, const ScaleLaw& scale, int m2,
                                   std::span<const double> alpha, Rng& rng) {
    return draw_dsbasg(n, family, scale, m2, alpha, rng).joint();
}

}  // namespace sba
