#ifndef SBA_DISTRIBUTIONS_HPP
#define SBA_DISTRIBUTIONS_HPP

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace sba {

// Every sampler takes its generator explicitly; a chain owns exactly one.
using Rng = std::mt19937_64;

/// Uniform on the open interval (0, 1) from 53 random bits.
double uniform_open(Rng& rng);

double normal_cdf(double z);
/// Upper tail 1 - Phi(z), accurate for large z.
double normal_sf(double z);
double normal_log_pdf(double z);
/// Inverse of Phi. Rational approximation refined by one Halley step;
/// absolute error below 1e-13 on (1e-300, 1 - 1e-16).
double normal_quantile(double p);

double sample_normal(Rng& rng, double mean, double sd);
double sample_gamma(Rng& rng, double shape, double rate);
/// Inverse-Gamma(shape, scale=rate): 1 / Gamma(shape, rate).
double sample_inverse_gamma(Rng& rng, double shape, double rate);
std::vector<double> sample_dirichlet(Rng& rng, std::span<const double> alpha);

/// Index drawn proportionally to exp(log_weights); -inf entries never chosen.
/// Returns -1 when every entry is -inf.
int sample_log_categorical(Rng& rng, std::span<const double> log_weights);

double log_sum_exp(std::span<const double> values);

}  // namespace sba

#endif  // SBA_DISTRIBUTIONS_HPP
