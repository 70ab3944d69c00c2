#ifndef SBA_KERNELS_HPP
#define SBA_KERNELS_HPP

#include <span>
#include <string>
#include <vector>

#include "sba/measure.hpp"
#include "sba/random_measures.hpp"

namespace sba {

// Mean-parameterized kernels k(y | theta, phi). For the Gaussian kernel phi is
// the VARIANCE; for Beta it is the precision a + b of Beta(a, b); for Gamma it
// is the shape.
enum class KernelKind { gaussian, beta, gamma };

KernelKind parse_kernel(const std::string& name);
std::string to_string(KernelKind kind);

/// Parameter space of theta: R, (0,1) or (0, inf).
Domain kernel_parameter_domain(KernelKind kind);
/// Whether y lies in the interior of the sample space.
bool in_sample_space(KernelKind kind, double y);

/// Throws DomainError when y, theta or phi lie outside their spaces.
double log_kernel(KernelKind kind, double y, double theta, double phi);

/// log sum_l w_l k(y | theta_l, phi_l) via log-sum-exp.
double mixture_logpdf(KernelKind kind, const JointDiscreteMeasure& mixing, double y);

std::vector<double> density_grid(KernelKind kind, const JointDiscreteMeasure& mixing,
                                 std::span<const double> grid);

}  // namespace sba

#endif  // SBA_KERNELS_HPP
