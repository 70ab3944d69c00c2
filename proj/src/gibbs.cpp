#include "sba/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "sba/error.hpp"

namespace sba {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kMinWidth = 1e-13;
constexpr double kLogWeightFloor = -745.0;
constexpr double kPhiFloor = 1e-12;

double log_weight(double w) {
    if (!(w > 0.0)) return kNegInf;
    const double lw = std::log(w);
    return lw < kLogWeightFloor ? kNegInf : lw;
}

double strictly_inside(double x, double a, double b) {
    if (!(x > a)) x = std::nextafter(a, b);
    if (!(x < b)) x = std::nextafter(b, a);
    return x;
}

bool is_conjugate(const FitConfig& config) {
    return config.kernel == KernelKind::gaussian && config.scale_prior.kind == ScaleLaw::Kind::inverse_gamma;
}

// Observations grouped by dispersion atom, each carrying the location its
// kernel is centred on.
struct DispersionGroups {
    std::vector<std::vector<std::size_t>> members;
};

DispersionGroups group_by(std::span<const int> index, std::size_t groups) {
    DispersionGroups out;
    out.members.resize(groups);
    for (std::size_t i = 0; i < index.size(); ++i) out.members[static_cast<std::size_t>(index[i])].push_back(i);
    return out;
}

// theta_of(i) gives the location of observation i.
template <class ThetaOf>
void update_dispersions(std::vector<double>& phis, const DispersionGroups& groups, const ChainModel& model,
                        ThetaOf theta_of, bool conjugate, Rng& rng, Diagnostics& diag) {
    const FitConfig& config = model.config();
    const auto data = model.data();
    for (std::size_t k = 0; k < phis.size(); ++k) {
        const auto& members = groups.members[k];
        if (conjugate) {
            double ss = 0.0;
            for (std::size_t i : members) {
                const double r = data[i] - theta_of(i);
                ss += r * r;
            }
            const double shape = config.scale_prior.p1 + 0.5 * static_cast<double>(members.size());
            const double rate = config.scale_prior.p2 + 0.5 * ss;
            phis[k] = std::max(sample_inverse_gamma(rng, shape, rate), kPhiFloor);
            continue;
        }
        auto target = [&](double omega) {
            const double phi = std::exp(omega);
            if (!(phi > 0.0) || !std::isfinite(phi)) return kNegInf;
            double total = config.scale_prior.log_density(phi) + omega;
            for (std::size_t i : members) total += log_kernel(config.kernel, data[i], theta_of(i), phi);
            return std::isnan(total) ? kNegInf : total;
        };
        bool exhausted = false;
        const double omega = slice_sample_unbounded(target, std::log(phis[k]), config.slice.log_width,
                                                    config.slice.max_steps_out, config.slice.max_shrink, rng,
                                                    &exhausted);
        if (exhausted) ++diag.phi_shrink_exhausted;
        phis[k] = std::max(std::exp(omega), kPhiFloor);
    }
}

}  // namespace

std::vector<double> GridSpec::points() const {
    std::vector<double> out(static_cast<std::size_t>(count));
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = lo + step * k;
    out.back() = hi;
    return out;
}

void FitConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::model, what); };
    if (n < 1 || n > kMaxDepth) fail("n must lie in 1.." + std::to_string(kMaxDepth));
    if (family.depth() != n) fail("node law family depth does not match n");
    if (iterations < 1) fail("iterations must be positive");
    if (burn_in < 0 || burn_in >= iterations) fail("burn_in must lie in [0, iterations)");
    if (thin < 1) fail("thin must be at least 1");
    if (!(slice.width_fraction > 0.0 && slice.width_fraction <= 1.0)) fail("slice width_fraction must lie in (0, 1]");
    if (slice.max_shrink < 1) fail("slice max_shrink must be positive");
    if (!(slice.log_width > 0.0)) fail("slice log_width must be positive");
    if (slice.max_steps_out < 0) fail("slice max_steps_out must be nonnegative");
    if (variant == Variant::general) {
        if (m2 < 1) fail("m2 must be positive");
        if (alpha.size() != static_cast<std::size_t>(m2)) fail("alpha must have exactly m2 entries");
        for (double a : alpha)
            if (!(a > 0.0)) fail("alpha entries must be positive");
    }
    const Domain theta_space = kernel_parameter_domain(kernel);
    const Domain& d = family.domain();
    if (d.lower < theta_space.lower || d.upper > theta_space.upper)
        fail("node law domain exceeds the kernel's parameter space");
    if (grid) {
        if (grid->count < 2) fail("grid count must be at least 2");
        if (!(grid->lo < grid->hi)) fail("grid needs lo < hi");
        if (!in_sample_space(kernel, grid->lo) || !in_sample_space(kernel, grid->hi))
            throw DomainError("grid end points lie outside the kernel's sample space");
    }
    if (initial_array) {
        if (initial_array->depth() != n) fail("initial array depth does not match n");
        if (!(initial_array->domain() == d)) fail("initial array domain differs from the family domain");
        if (!validate_sba(*initial_array).empty()) throw InvalidArray("initial array is not a valid SBA");
    }
}

Diagnostics& Diagnostics::operator+=(const Diagnostics& other) {
    node_shrink_exhausted += other.node_shrink_exhausted;
    phi_shrink_exhausted += other.phi_shrink_exhausted;
    degenerate_intervals += other.degenerate_intervals;
    return *this;
}

ChainState::ChainState(BarycenterArray initial, std::vector<double> phis_,
                       std::vector<std::vector<double>> scale_weights_)
    : array(std::move(initial)),
      cdf(array.depth()),
      phis(std::move(phis_)),
      scale_weights(std::move(scale_weights_)) {
    refresh();
    if (!general() && phis.size() != atoms.size())
        throw Error(ErrorKind::invalid_argument, "parsimonious state needs one dispersion per location");
    if (general() && scale_weights.size() != atoms.size())
        throw Error(ErrorKind::invalid_argument, "general state needs one scale-weight row per location");
    for (const auto& row : scale_weights)
        if (row.size() != phis.size()) throw Error(ErrorKind::invalid_argument, "scale-weight rows must have m2 entries");
}

ChainState ChainState::from_draw(const LocationScaleDraw& draw) {
    return ChainState(draw.array, draw.phis, draw.scale_weights);
}

void ChainState::refresh() {
    invert_cdf_unchecked(array, cdf);
    weights = weights_from_table(array, cdf);
    atoms = level_atoms(array);
}

JointDiscreteMeasure ChainState::mixing() const {
    std::vector<JointAtom> out;
    if (!general()) {
        for (std::size_t l = 0; l < atoms.size(); ++l) out.push_back({atoms[l], phis[l], weights[l]});
    } else {
        for (std::size_t l = 0; l < atoms.size(); ++l)
            for (std::size_t k = 0; k < phis.size(); ++k)
                out.push_back({atoms[l], phis[k], weights[l] * scale_weights[l][k]});
    }
    return JointDiscreteMeasure(std::move(out));
}

ChainModel::ChainModel(const FitConfig& config, std::span<const double> data) : config_(config), data_(data) {
    f1_.resize(data.size());
    f2_.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double y = data[i];
        if (!in_sample_space(config.kernel, y))
            throw DomainError("observation " + std::to_string(i + 1) + " (" + std::to_string(y) +
                              ") lies outside the " + to_string(config.kernel) + " kernel's sample space");
        switch (config.kernel) {
            case KernelKind::gaussian: break;
            case KernelKind::beta: f1_[i] = std::log(y); f2_[i] = std::log1p(-y); break;
            case KernelKind::gamma: f1_[i] = std::log(y); f2_[i] = y; break;
        }
    }
}

void ChainModel::components(const ChainState& state, std::vector<Component>& out) const {
    out.clear();
    auto add = [&](double lw, double theta, double phi) {
        Component c{theta, phi, lw, 0.0, 0.0};
        switch (config_.kernel) {
            case KernelKind::gaussian:
                c.c0 = lw - 0.5 * std::log(2.0 * std::numbers::pi * phi);
                c.c1 = -0.5 / phi;
                break;
            case KernelKind::beta: {
                const double a = theta * phi;
                const double b = (1.0 - theta) * phi;
                c.c0 = lw + std::lgamma(phi) - std::lgamma(a) - std::lgamma(b);
                c.c1 = a - 1.0;
                c.c2 = b - 1.0;
                break;
            }
            case KernelKind::gamma: {
                const double rate = phi / theta;
                c.c0 = lw + phi * std::log(rate) - std::lgamma(phi);
                c.c1 = phi - 1.0;
                c.c2 = -rate;
                break;
            }
        }
        if (lw == kNegInf) c.c0 = kNegInf;
        out.push_back(c);
    };
    if (!state.general()) {
        for (std::size_t l = 0; l < state.atoms.size(); ++l)
            add(log_weight(state.weights[l]), state.atoms[l], state.phis[l]);
    } else {
        for (std::size_t l = 0; l < state.atoms.size(); ++l) {
            const double lw = log_weight(state.weights[l]);
            for (std::size_t k = 0; k < state.phis.size(); ++k)
                add(lw + log_weight(state.scale_weights[l][k]), state.atoms[l], state.phis[k]);
        }
    }
}

double ChainModel::log_term(const Component& c, double y, double f1, double f2) const {
    if (config_.kernel == KernelKind::gaussian) {
        const double r = y - c.theta;
        return c.c0 + c.c1 * r * r;
    }
    return c.c0 + c.c1 * f1 + c.c2 * f2;
}

double ChainModel::log_mix(double y, double f1, double f2, const std::vector<Component>& comps,
                           std::vector<double>& scratch) const {
    scratch.resize(comps.size());
    double peak = kNegInf;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        scratch[c] = log_term(comps[c], y, f1, f2);
        peak = std::max(peak, scratch[c]);
    }
    if (!std::isfinite(peak)) return peak;
    double sum = 0.0;
    for (double t : scratch) sum += std::exp(t - peak);
    return peak + std::log(sum);
}

std::vector<double> ChainModel::pointwise_loglik(const ChainState& state) const {
    std::vector<Component> comps;
    components(state, comps);
    std::vector<double> scratch;
    std::vector<double> out(data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) out[i] = log_mix(data_[i], f1_[i], f2_[i], comps, scratch);
    return out;
}

double ChainModel::total_loglik(const ChainState& state) const {
    std::vector<Component> comps;
    components(state, comps);
    std::vector<double> scratch;
    double total = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) total += log_mix(data_[i], f1_[i], f2_[i], comps, scratch);
    return total;
}

std::vector<double> ChainModel::density(const ChainState& state, std::span<const double> grid) const {
    std::vector<Component> comps;
    components(state, comps);
    std::vector<double> scratch;
    std::vector<double> out(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double y = grid[g];
        double f1 = 0.0, f2 = 0.0;
        if (config_.kernel == KernelKind::beta) {
            f1 = std::log(y);
            f2 = std::log1p(-y);
        } else if (config_.kernel == KernelKind::gamma) {
            f1 = std::log(y);
            f2 = y;
        }
        out[g] = std::exp(log_mix(y, f1, f2, comps, scratch));
    }
    return out;
}

void update_allocations_parsimonious(ChainState& state, const ChainModel& model, Rng& rng) {
    const auto data = model.data();
    std::vector<ChainModel::Component> comps;
    model.components(state, comps);
    std::vector<double> logp(comps.size());
    state.alloc_theta.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double y = data[i];
        double f1 = 0.0, f2 = 0.0;
        if (model.kernel() == KernelKind::beta) {
            f1 = std::log(y);
            f2 = std::log1p(-y);
        } else if (model.kernel() == KernelKind::gamma) {
            f1 = std::log(y);
            f2 = y;
        }
        for (std::size_t c = 0; c < comps.size(); ++c) logp[c] = model.log_term(comps[c], y, f1, f2);
        const int z = sample_log_categorical(rng, logp);
        if (z < 0) throw AllMinusInfinity("every component has zero density at observation " + std::to_string(i + 1));
        state.alloc_theta[i] = z;
    }
}

void update_allocations_general(ChainState& state, const ChainModel& model, Rng& rng) {
    const auto data = model.data();
    const int m2 = static_cast<int>(state.phis.size());
    std::vector<ChainModel::Component> comps;
    model.components(state, comps);
    std::vector<double> logp(comps.size());
    state.alloc_theta.resize(data.size());
    state.alloc_phi.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double y = data[i];
        double f1 = 0.0, f2 = 0.0;
        if (model.kernel() == KernelKind::beta) {
            f1 = std::log(y);
            f2 = std::log1p(-y);
        } else if (model.kernel() == KernelKind::gamma) {
            f1 = std::log(y);
            f2 = y;
        }
        for (std::size_t c = 0; c < comps.size(); ++c) logp[c] = model.log_term(comps[c], y, f1, f2);
        const int z = sample_log_categorical(rng, logp);
        if (z < 0) throw AllMinusInfinity("every component has zero density at observation " + std::to_string(i + 1));
        state.alloc_theta[i] = z / m2;
        state.alloc_phi[i] = z % m2;
    }
}

void update_phi_gaussian(ChainState& state, const ChainModel& model, double shape, double rate, Rng& rng) {
    if (model.kernel() != KernelKind::gaussian) throw Error(ErrorKind::invalid_argument, "conjugate update needs the gaussian kernel");
    const auto data = model.data();
    const auto groups = group_by(state.alloc_theta, state.phis.size());
    for (std::size_t k = 0; k < state.phis.size(); ++k) {
        double ss = 0.0;
        for (std::size_t i : groups.members[k]) {
            const double r = data[i] - state.atoms[k];
            ss += r * r;
        }
        const double a = shape + 0.5 * static_cast<double>(groups.members[k].size());
        state.phis[k] = std::max(sample_inverse_gamma(rng, a, rate + 0.5 * ss), kPhiFloor);
    }
}

void update_phi_nonconjugate(ChainState& state, const ChainModel& model, Rng& rng, Diagnostics& diag) {
    const auto groups = group_by(state.alloc_theta, state.phis.size());
    auto theta_of = [&](std::size_t i) { return state.atoms[static_cast<std::size_t>(state.alloc_theta[i])]; };
    update_dispersions(state.phis, groups, model, theta_of, false, rng, diag);
}

void update_scale_weights(ChainState& state, std::span<const double> alpha, Rng& rng) {
    const std::size_t m2 = state.phis.size();
    if (alpha.size() != m2) throw Error(ErrorKind::invalid_argument, "alpha must have m2 entries");
    std::vector<std::vector<double>> counts(state.atoms.size(), std::vector<double>(m2, 0.0));
    for (std::size_t i = 0; i < state.alloc_theta.size(); ++i)
        counts[static_cast<std::size_t>(state.alloc_theta[i])][static_cast<std::size_t>(state.alloc_phi[i])] += 1.0;
    for (std::size_t l = 0; l < state.atoms.size(); ++l) {
        for (std::size_t k = 0; k < m2; ++k) counts[l][k] += alpha[k];
        state.scale_weights[l] = sample_dirichlet(rng, counts[l]);
    }
}

void update_scale_atoms_general(ChainState& state, const ChainModel& model, Rng& rng, Diagnostics& diag) {
    const auto groups = group_by(state.alloc_phi, state.phis.size());
    auto theta_of = [&](std::size_t i) { return state.atoms[static_cast<std::size_t>(state.alloc_theta[i])]; };
    update_dispersions(state.phis, groups, model, theta_of, is_conjugate(model.config()), rng, diag);
}

Interval feasible_interval(const BarycenterArray& array, int j, long l) {
    const int bottom = array.rows();
    const long pos = l << (bottom - j);
    return {array.at(bottom, pos - 1), array.at(bottom, pos + 1)};
}

bool update_node(ChainState& state, const ChainModel& model, int j, long l, Rng& rng, Diagnostics& diag) {
    const FitConfig& config = model.config();
    const NodeLaw& law = config.family.law(j, l);
    if (law.is_degenerate()) return false;
    const Interval I = feasible_interval(state.array, j, l);
    if (!(I.width() >= kMinWidth)) {
        ++diag.degenerate_intervals;
        return false;
    }
    const bool strict = config.node_target == NodeTarget::strict_joint;
    const double x0 = state.array.at(j, l);
    auto position = [&](double u) { return strictly_inside(law.restricted_quantile(I.lo, I.hi, u), I.lo, I.hi); };
    auto evaluate = [&](double x) {
        state.array.set_node(j, l, x);
        state.refresh();
        double t = model.total_loglik(state);
        if (strict) t += log_prior_density(state.array, config.family) - law.log_density(x);
        return t;
    };
    // The restricted prior is uniform in u, so only the remaining factors enter.
    auto target = [&](double u) { return evaluate(position(u)); };

    const double u0 = law.restricted_cdf(I.lo, I.hi, x0);
    const double w = config.slice.width_fraction;
    double lo = 0.0, hi = 1.0;
    if (w < 1.0) {
        lo = std::max(0.0, u0 - w * uniform_open(rng));
        hi = std::min(1.0, lo + w);
    }
    const double init_value = evaluate(x0);
    bool exhausted = false;
    const double u = slice_sample_bounded(target, lo, hi, u0, init_value, config.slice.max_shrink, rng, &exhausted);
    if (exhausted) ++diag.node_shrink_exhausted;
    state.array.set_node(j, l, exhausted ? x0 : position(u));
    state.refresh();
    return true;
}

double slice_sample_bounded(const LogTarget& log_target, double lo, double hi, double init, int max_shrink,
                            Rng& rng, bool* exhausted) {
    return slice_sample_bounded(log_target, lo, hi, init, log_target(init), max_shrink, rng, exhausted);
}

double slice_sample_bounded(const LogTarget& log_target, double lo, double hi, double init,
                            double log_target_init, int max_shrink, Rng& rng, bool* exhausted) {
    if (!std::isfinite(log_target_init)) throw NonFiniteTarget("slice target is not finite at the current value");
    if (exhausted) *exhausted = false;
    const double level = log_target_init + std::log(uniform_open(rng));
    double left = lo, right = hi;
    for (int k = 0; k < max_shrink; ++k) {
        const double x = left + uniform_open(rng) * (right - left);
        if (log_target(x) > level) return x;
        if (x < init) left = x;
        else right = x;
    }
    if (exhausted) *exhausted = true;
    return init;
}

double slice_sample_unbounded(const LogTarget& log_target, double init, double width, int max_steps,
                              int max_shrink, Rng& rng, bool* exhausted) {
    const double f0 = log_target(init);
    if (!std::isfinite(f0)) throw NonFiniteTarget("slice target is not finite at the current value");
    if (exhausted) *exhausted = false;
    const double level = f0 + std::log(uniform_open(rng));
    double left = init - width * uniform_open(rng);
    double right = left + width;
    long steps_left = static_cast<long>(std::floor(max_steps * uniform_open(rng)));
    long steps_right = max_steps - 1 - steps_left;
    while (steps_left > 0 && log_target(left) > level) {
        left -= width;
        --steps_left;
    }
    while (steps_right > 0 && log_target(right) > level) {
        right += width;
        --steps_right;
    }
    for (int k = 0; k < max_shrink; ++k) {
        const double x = left + uniform_open(rng) * (right - left);
        if (log_target(x) > level) return x;
        if (x < init) left = x;
        else right = x;
    }
    if (exhausted) *exhausted = true;
    return init;
}

void sweep(ChainState& state, const ChainModel& model, Rng& rng, Diagnostics& diag) {
    const FitConfig& config = model.config();
    if (!state.general()) {
        update_allocations_parsimonious(state, model, rng);
        if (is_conjugate(config)) update_phi_gaussian(state, model, config.scale_prior.p1, config.scale_prior.p2, rng);
        else update_phi_nonconjugate(state, model, rng, diag);
    } else {
        update_allocations_general(state, model, rng);
        update_scale_weights(state, config.alpha, rng);
        update_scale_atoms_general(state, model, rng, diag);
    }
    if (config.freeze_nodes) return;
    // Deepest rows first; row 1 holds only the root, which therefore goes last.
    for (int j = state.array.rows(); j >= 1; --j)
        for (long p = 1; p < (1L << j); p += 2) update_node(state, model, j, p, rng, diag);
}

void Trace::append(Trace&& other) {
    if (grid.empty()) grid = std::move(other.grid);
    for (auto& row : other.loglik) loglik.push_back(std::move(row));
    for (auto& row : other.density) density.push_back(std::move(row));
    for (auto& snap : other.mixing) mixing.push_back(std::move(snap));
    mean.insert(mean.end(), other.mean.begin(), other.mean.end());
    diagnostics += other.diagnostics;
}

Trace run_chain(const FitConfig& config, std::span<const double> data) {
    config.validate();
    const ChainModel model(config, data);
    Rng rng(config.seed);

    std::optional<ChainState> state;
    if (config.initial_array) {
        const std::size_t m = std::size_t{1} << config.n;
        const bool general = config.variant == Variant::general;
        std::vector<double> phis(general ? static_cast<std::size_t>(config.m2) : m);
        for (double& phi : phis) phi = config.scale_prior.sample(rng);
        std::vector<std::vector<double>> rows;
        if (general)
            for (std::size_t l = 0; l < m; ++l) rows.push_back(sample_dirichlet(rng, config.alpha));
        state.emplace(*config.initial_array, std::move(phis), std::move(rows));
    } else if (config.variant == Variant::general) {
        state.emplace(ChainState::from_draw(
            draw_dsbasg(config.n, config.family, config.scale_prior, config.m2, config.alpha, rng)));
    } else {
        state.emplace(ChainState::from_draw(draw_dsbasp(config.n, config.family, config.scale_prior, rng)));
    }

    Trace trace;
    if (config.grid) {
        trace.grid = config.grid->points();
    } else if (!data.empty()) {
        const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
        if (*lo < *hi) trace.grid = GridSpec{*lo, *hi, 200}.points();
    }
    const long retained = config.retained_draws();
    trace.loglik.reserve(static_cast<std::size_t>(retained));
    trace.density.reserve(static_cast<std::size_t>(retained));
    trace.mean.reserve(static_cast<std::size_t>(retained));

    for (long it = 1; it <= config.iterations; ++it) {
        sweep(*state, model, rng, trace.diagnostics);
        const bool keep = it > config.burn_in && (it - config.burn_in) % config.thin == 0;
        if (!keep) continue;
        auto ll = model.pointwise_loglik(*state);
        for (double v : ll)
            if (!std::isfinite(v))
                throw Error(ErrorKind::numerical, "chain aborted at iteration " + std::to_string(it) +
                                                      ": non-finite log likelihood");
        trace.loglik.push_back(std::move(ll));
        if (!trace.grid.empty()) trace.density.push_back(model.density(*state, trace.grid));
        double mean = 0.0;
        for (std::size_t l = 0; l < state->atoms.size(); ++l) mean += state->weights[l] * state->atoms[l];
        trace.mean.push_back(mean);
        if (config.keep_mixing) trace.mixing.push_back(state->mixing().atoms());
    }
    return trace;
}

Trace run_chains(const FitConfig& config, std::span<const double> data, int chains) {
    if (chains < 1) throw Error(ErrorKind::invalid_argument, "chains must be at least 1");
    if (chains == 1) return run_chain(config, data);
    std::vector<Trace> traces(static_cast<std::size_t>(chains));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(chains));
    {
        std::vector<std::jthread> workers;
        for (int c = 0; c < chains; ++c) {
            workers.emplace_back([&, c] {
                try {
                    FitConfig local = config;
                    local.seed = config.seed + static_cast<std::uint64_t>(c);
                    traces[static_cast<std::size_t>(c)] = run_chain(local, data);
                } catch (...) {
                    errors[static_cast<std::size_t>(c)] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    Trace merged;
    for (auto& t : traces) merged.append(std::move(t));
    return merged;
}

}  // namespace sba
