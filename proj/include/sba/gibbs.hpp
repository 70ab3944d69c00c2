#ifndef SBA_GIBBS_HPP
#define SBA_GIBBS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sba/barycenter_array.hpp"
#include "sba/distributions.hpp"
#include "sba/kernels.hpp"
#include "sba/random_measures.hpp"

namespace sba {

enum class Variant { parsimonious, general };

// Which full conditional the node updates target. `paper` uses the node's own
// prior density times the allocation-marginalized likelihood; `strict_joint`
// also carries the normalizers of every restricted law whose interval moves
// with the node, so that the chain leaves the joint posterior invariant.
enum class NodeTarget { paper, strict_joint };

struct SliceSettings {
    double width_fraction = 1.0;  // node bracket, as a fraction of its feasible interval
    int max_shrink = 100;
    double log_width = 1.0;       // stepping-out width for dispersions on the log scale
    int max_steps_out = 32;
};

struct GridSpec {
    double lo = 0.0;
    double hi = 1.0;
    int count = 200;

    std::vector<double> points() const;
};

struct FitConfig {
    KernelKind kernel = KernelKind::gaussian;
    Variant variant = Variant::parsimonious;
    int n = 4;
    int m2 = 1;
    std::vector<double> alpha;  // general variant, length m2
    NodeLawFamily family;
    ScaleLaw scale_prior = ScaleLaw::inverse_gamma(0.5, 1.5);
    long iterations = 1000;
    long burn_in = 0;
    long thin = 1;
    std::uint64_t seed = 0;
    SliceSettings slice;
    std::optional<GridSpec> grid;  // defaults to the data range, 200 points
    NodeTarget node_target = NodeTarget::paper;
    bool freeze_nodes = false;
    std::optional<BarycenterArray> initial_array;
    bool keep_mixing = true;

    /// Throws Error(model) on inconsistent settings.
    void validate() const;
    long retained_draws() const { return (iterations - burn_in) / thin; }
};

struct Diagnostics {
    long node_shrink_exhausted = 0;
    long phi_shrink_exhausted = 0;
    long degenerate_intervals = 0;

    Diagnostics& operator+=(const Diagnostics& other);
};

/// Mutable state of one chain.
struct ChainState {
    BarycenterArray array;
    CdfTable cdf;
    std::vector<double> weights;  // location weights, 2^n
    std::vector<double> atoms;    // locations, 2^n
    std::vector<double> phis;     // 2^n (parsimonious) or m2 (general)
    std::vector<std::vector<double>> scale_weights;  // general only, 2^n x m2
    std::vector<int> alloc_theta;
    std::vector<int> alloc_phi;  // general only

    ChainState(BarycenterArray initial, std::vector<double> phis,
               std::vector<std::vector<double>> scale_weights = {});
    static ChainState from_draw(const LocationScaleDraw& draw);

    bool general() const { return !scale_weights.empty(); }
    /// Recomputes the CDF table, weights and atoms after the array changed.
    void refresh();
    JointDiscreteMeasure mixing() const;
};

/// Per-observation features shared by all likelihood evaluations of a chain.
class ChainModel {
public:
    ChainModel(const FitConfig& config, std::span<const double> data);

    const FitConfig& config() const { return config_; }
    std::span<const double> data() const { return data_; }
    KernelKind kernel() const { return config_.kernel; }

    /// Per-observation log f(y_i | G) for the state's current mixing measure.
    std::vector<double> pointwise_loglik(const ChainState& state) const;
    double total_loglik(const ChainState& state) const;
    /// Mixture density of the current state at each grid point.
    std::vector<double> density(const ChainState& state, std::span<const double> grid) const;

    /// Mixture component with its log-kernel constants folded in:
    /// log(w k(y)) = c0 + c1 * (y - theta)^2 for the Gaussian kernel, and
    /// c0 + c1 * f1(y) + c2 * f2(y) for Beta and Gamma.
    struct Component {
        double theta;
        double phi;
        double c0, c1, c2;
    };
    /// Components in allocation order: index c for the parsimonious variant,
    /// j1 * m2 + j2 for the general one. Zero-weight components have c0 = -inf.
    void components(const ChainState& state, std::vector<Component>& out) const;
    double log_term(const Component& c, double y, double f1, double f2) const;

private:
    double log_mix(double y, double f1, double f2, const std::vector<Component>& comps,
                   std::vector<double>& scratch) const;

    FitConfig config_;
    std::span<const double> data_;
    std::vector<double> f1_, f2_;
};

void update_allocations_parsimonious(ChainState& state, const ChainModel& model, Rng& rng);
void update_allocations_general(ChainState& state, const ChainModel& model, Rng& rng);

/// Conjugate inverse-gamma update of each component variance (Gaussian kernel).
void update_phi_gaussian(ChainState& state, const ChainModel& model, double shape, double rate, Rng& rng);
/// Slice update of each dispersion on the log scale.
void update_phi_nonconjugate(ChainState& state, const ChainModel& model, Rng& rng, Diagnostics& diag);

void update_scale_weights(ChainState& state, std::span<const double> alpha, Rng& rng);
void update_scale_atoms_general(ChainState& state, const ChainModel& model, Rng& rng, Diagnostics& diag);

struct Interval {
    double lo;
    double hi;
    double width() const { return hi - lo; }
};

/// Values the odd node (j, l) may take without breaking the array ordering:
/// its nearest neighbours in the bottom row. Equals the child-induced interval
/// when the node's children sit in the bottom row, and the parent interval for
/// bottom-row nodes.
Interval feasible_interval(const BarycenterArray& array, int j, long l);

/// Slice update of one odd node. Returns false when the node was left unchanged
/// because its feasible interval is degenerate.
bool update_node(ChainState& state, const ChainModel& model, int j, long l, Rng& rng, Diagnostics& diag);

using LogTarget = std::function<double(double)>;

/// One shrinkage slice transition on (lo, hi] starting from `init`. Returns
/// `init` and sets *exhausted when max_shrink proposals were all rejected.
double slice_sample_bounded(const LogTarget& log_target, double lo, double hi, double init,
                            int max_shrink, Rng& rng, bool* exhausted = nullptr);
/// As above with the target value at `init` already known.
double slice_sample_bounded(const LogTarget& log_target, double lo, double hi, double init,
                            double log_target_init, int max_shrink, Rng& rng, bool* exhausted);

/// Stepping-out slice transition on the whole real line.
double slice_sample_unbounded(const LogTarget& log_target, double init, double width, int max_steps,
                              int max_shrink, Rng& rng, bool* exhausted = nullptr);

/// One full Gibbs sweep in the documented order.
void sweep(ChainState& state, const ChainModel& model, Rng& rng, Diagnostics& diag);

struct Trace {
    std::vector<double> grid;
    std::vector<std::vector<double>> loglik;   // draws x observations
    std::vector<std::vector<double>> density;  // draws x grid points
    std::vector<std::vector<JointAtom>> mixing;
    std::vector<double> mean;                  // theta-marginal mean per draw
    Diagnostics diagnostics;

    std::size_t draws() const { return loglik.size(); }
    void append(Trace&& other);
};

Trace run_chain(const FitConfig& config, std::span<const double> data);
/// Independent chains seeded seed + c, run concurrently and concatenated.
Trace run_chains(const FitConfig& config, std::span<const double> data, int chains);

}  // namespace sba

#endif  // SBA_GIBBS_HPP
