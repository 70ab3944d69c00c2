#include "sba/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sba/distributions.hpp"
#include "sba/error.hpp"

namespace sba {

namespace {

void close_ends(std::vector<QuantilePiece>& pieces) {
    if (pieces.empty()) return;
    pieces.front().u0 = 0.0;
    pieces.back().u1 = 1.0;
}

double at(const QuantilePiece& q, double u) {
    if (q.x0 == q.x1 || q.u1 <= q.u0) return q.x0;
    const double t = std::clamp((u - q.u0) / (q.u1 - q.u0), 0.0, 1.0);
    return q.x0 + t * (q.x1 - q.x0);
}

// Mean of |d|^p over a segment where d runs linearly from d0 to d1.
double mean_abs_power(double d0, double d1, double p) {
    const double a = std::abs(d0);
    const double b = std::abs(d1);
    if ((d0 < 0.0) != (d1 < 0.0) && a > 0.0 && b > 0.0)
        return (std::pow(a, p + 1.0) + std::pow(b, p + 1.0)) / ((p + 1.0) * (a + b));
    const double hi = std::max(a, b);
    if (hi == 0.0) return 0.0;
    if (std::abs(a - b) <= 1e-6 * hi) {
        const double m = 0.5 * (a + b);
        return (std::pow(a, p) + 4.0 * std::pow(m, p) + std::pow(b, p)) / 6.0;
    }
    return (std::pow(b, p + 1.0) - std::pow(a, p + 1.0)) / ((p + 1.0) * (b - a));
}

double log_mean_exp_sorted(std::span<const double> sorted) {
    const double peak = sorted.back();
    if (!std::isfinite(peak)) return peak;
    double sum = 0.0;
    for (double v : sorted) sum += std::exp(v - peak);
    return peak + std::log(sum / static_cast<double>(sorted.size()));
}

void check_matrix(const LogLikMatrix& ll) {
    if (ll.size() < 2) throw TooFewSamples("log-likelihood matrix needs at least 2 draws");
    const std::size_t obs = ll.front().size();
    if (obs == 0) throw Error(ErrorKind::invalid_argument, "log-likelihood matrix has no observations");
    for (const auto& row : ll) {
        if (row.size() != obs) throw Error(ErrorKind::invalid_argument, "log-likelihood matrix is ragged");
        for (double v : row)
            if (!std::isfinite(v)) throw Error(ErrorKind::numerical, "log-likelihood matrix has non-finite entries");
    }
}

std::vector<double> sorted_column(const LogLikMatrix& ll, std::size_t i, double sign) {
    std::vector<double> col(ll.size());
    for (std::size_t s = 0; s < ll.size(); ++s) col[s] = sign * ll[s][i];
    std::sort(col.begin(), col.end());
    return col;
}

}  // namespace

std::vector<QuantilePiece> quantile_pieces(const DiscreteMeasure& measure) {
    std::vector<QuantilePiece> out;
    double cum = 0.0;
    for (std::size_t k = 0; k < measure.size(); ++k) {
        const double next = cum + measure.weights()[k];
        out.push_back({cum, next, measure.atoms()[k], measure.atoms()[k]});
        cum = next;
    }
    close_ends(out);
    return out;
}

std::vector<QuantilePiece> quantile_pieces(const AnalyticMeasure& measure) {
    const auto xs = measure.breakpoints();
    std::vector<QuantilePiece> out;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double left = measure.cdf_left(xs[k]);
        const double value = measure.cdf(xs[k]);
        if (value > left) out.push_back({left, value, xs[k], xs[k]});
        if (k + 1 < xs.size()) {
            const double next_left = measure.cdf_left(xs[k + 1]);
            if (next_left > value) out.push_back({value, next_left, xs[k], xs[k + 1]});
        }
    }
    close_ends(out);
    return out;
}

double wasserstein_p(std::span<const QuantilePiece> q1, std::span<const QuantilePiece> q2, double p) {
    if (!(p >= 1.0)) throw Error(ErrorKind::invalid_argument, "Wasserstein order must be at least 1");
    if (q1.empty() || q2.empty()) throw Error(ErrorKind::invalid_argument, "Wasserstein distance needs nonempty measures");
    std::size_t a = 0, b = 0;
    double u = 0.0;
    double total = 0.0;
    while (a < q1.size() && b < q2.size()) {
        const double next = std::min(q1[a].u1, q2[b].u1);
        if (next > u) {
            const double d0 = at(q1[a], u) - at(q2[b], u);
            const double d1 = at(q1[a], next) - at(q2[b], next);
            total += (next - u) * mean_abs_power(d0, d1, p);
            u = next;
        }
        if (q1[a].u1 <= next) ++a;
        if (q2[b].u1 <= next) ++b;
    }
    return std::pow(total, 1.0 / p);
}

double wasserstein_p(const DiscreteMeasure& m1, const DiscreteMeasure& m2, double p) {
    return wasserstein_p(quantile_pieces(m1), quantile_pieces(m2), p);
}

double wasserstein_p(const AnalyticMeasure& m1, const DiscreteMeasure& m2, double p) {
    return wasserstein_p(quantile_pieces(m1), quantile_pieces(m2), p);
}

double integrate_grid(std::span<const double> grid, std::span<const double> values) {
    if (grid.size() != values.size()) throw Error(ErrorKind::invalid_argument, "grid and values differ in length");
    double total = 0.0;
    for (std::size_t k = 1; k < grid.size(); ++k)
        total += 0.5 * (grid[k] - grid[k - 1]) * (values[k] + values[k - 1]);
    return total;
}

double hellinger_grid(std::span<const double> f, std::span<const double> g, std::span<const double> grid) {
    if (f.size() != g.size() || f.size() != grid.size())
        throw Error(ErrorKind::invalid_argument, "hellinger_grid needs equal-length inputs");
    std::vector<double> sq(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (f[k] < 0.0 || g[k] < 0.0) throw Error(ErrorKind::invalid_argument, "densities must be nonnegative");
        const double d = std::sqrt(f[k]) - std::sqrt(g[k]);
        sq[k] = d * d;
    }
    return std::sqrt(std::clamp(0.5 * integrate_grid(grid, sq), 0.0, 1.0));
}

WaicResult waic(const LogLikMatrix& ll) {
    check_matrix(ll);
    const double draws = static_cast<double>(ll.size());
    WaicResult r{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < ll.front().size(); ++i) {
        const auto col = sorted_column(ll, i, 1.0);
        r.lppd += log_mean_exp_sorted(col);
        double mean = 0.0;
        for (double v : col) mean += v;
        mean /= draws;
        double ss = 0.0;
        for (double v : col) ss += (v - mean) * (v - mean);
        r.p_waic += ss / (draws - 1.0);
    }
    r.waic = -2.0 * (r.lppd - r.p_waic);
    return r;
}

LpmlResult lpml_cpo(const LogLikMatrix& ll) {
    check_matrix(ll);
    LpmlResult r{0.0, {}};
    for (std::size_t i = 0; i < ll.front().size(); ++i) {
        const auto col = sorted_column(ll, i, -1.0);
        const double log_cpo = -log_mean_exp_sorted(col);
        r.log_cpo.push_back(log_cpo);
        r.lpml += log_cpo;
    }
    return r;
}

std::pair<double, double> hpd_interval(std::span<const double> samples, double prob) {
    if (samples.size() < 20) throw TooFewSamples("HPD interval needs at least 20 samples");
    if (!(prob > 0.0 && prob < 1.0)) throw Error(ErrorKind::invalid_argument, "HPD probability must lie in (0,1)");
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    const std::size_t m = x.size();
    const auto span = std::min(m - 1, static_cast<std::size_t>(std::ceil(prob * static_cast<double>(m))));
    std::size_t best = 0;
    double width = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + span < m; ++i) {
        const double w = x[i + span] - x[i];
        if (w < width) {
            width = w;
            best = i;
        }
    }
    return {x[best], x[best + span]};
}

std::vector<BandPoint> density_band(const Trace& trace, double prob) {
    if (trace.density.empty()) throw Error(ErrorKind::invalid_argument, "trace has no density draws");
    const std::size_t points = trace.density.front().size();
    std::vector<BandPoint> out(points);
    std::vector<double> column(trace.density.size());
    for (std::size_t g = 0; g < points; ++g) {
        double sum = 0.0;
        for (std::size_t s = 0; s < trace.density.size(); ++s) {
            column[s] = trace.density[s][g];
            sum += column[s];
        }
        out[g].mean = sum / static_cast<double>(column.size());
        if (column.size() >= 20) {
            std::tie(out[g].lo, out[g].hi) = hpd_interval(column, prob);
        } else {
            const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
            out[g].lo = *lo;
            out[g].hi = *hi;
        }
    }
    return out;
}

int count_local_maxima(std::span<const double> values) {
    std::vector<double> v;
    for (double x : values)
        if (v.empty() || x != v.back()) v.push_back(x);
    int count = 0;
    for (std::size_t k = 1; k + 1 < v.size(); ++k)
        if (v[k] > v[k - 1] && v[k] > v[k + 1]) ++count;
    return count;
}

}  // namespace sba
