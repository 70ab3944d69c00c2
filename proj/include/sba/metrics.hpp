#ifndef SBA_METRICS_HPP
#define SBA_METRICS_HPP

#include <span>
#include <utility>
#include <vector>

#include "sba/barycenter_array.hpp"
#include "sba/gibbs.hpp"
#include "sba/measure.hpp"

namespace sba {

/// Linear piece of a quantile function: on (u0, u1] it runs from x0 to x1.
/// Atoms give constant pieces.
struct QuantilePiece {
    double u0, u1;
    double x0, x1;
};

std::vector<QuantilePiece> quantile_pieces(const DiscreteMeasure& measure);
std::vector<QuantilePiece> quantile_pieces(const AnalyticMeasure& measure);

/// (integral over (0,1) of |F1^-1 - F2^-1|^p)^(1/p), evaluated exactly from
/// the piecewise-linear quantile functions. p >= 1.
double wasserstein_p(std::span<const QuantilePiece> q1, std::span<const QuantilePiece> q2, double p);
double wasserstein_p(const DiscreteMeasure& m1, const DiscreteMeasure& m2, double p);
double wasserstein_p(const AnalyticMeasure& m1, const DiscreteMeasure& m2, double p);

/// Trapezoid rule over an increasing grid.
double integrate_grid(std::span<const double> grid, std::span<const double> values);

/// (1/2 integral (sqrt f - sqrt g)^2)^(1/2) by the trapezoid rule, clipped to [0,1].
double hellinger_grid(std::span<const double> f, std::span<const double> g, std::span<const double> grid);

/// draws x observations matrix of log f(y_i | G^(m)).
using LogLikMatrix = std::vector<std::vector<double>>;

struct WaicResult {
    double waic;
    double lppd;
    double p_waic;
};

struct LpmlResult {
    double lpml;
    std::vector<double> log_cpo;
};

// Both criteria sort each observation's column before summing, so the result
// does not depend on the order of the draws.
WaicResult waic(const LogLikMatrix& ll);
LpmlResult lpml_cpo(const LogLikMatrix& ll);

/// Shortest window [x_(i), x_(i+k)] of the sorted sample with k = ceil(prob M),
/// leftmost on ties. Needs at least 20 samples.
std::pair<double, double> hpd_interval(std::span<const double> samples, double prob);

struct BandPoint {
    double mean;
    double lo;
    double hi;
};

/// Pointwise posterior mean and HPD interval of the density draws. With fewer
/// than 20 draws the interval falls back to the sample range.
std::vector<BandPoint> density_band(const Trace& trace, double prob);

/// Interior strict local maxima, with plateaus counted once.
int count_local_maxima(std::span<const double> values);

}  // namespace sba

#endif  // SBA_METRICS_HPP
