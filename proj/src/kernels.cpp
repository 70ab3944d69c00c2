#include "sba/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "sba/error.hpp"

namespace sba {

KernelKind parse_kernel(const std::string& name) {
    if (name == "gaussian" || name == "normal") return KernelKind::gaussian;
    if (name == "beta") return KernelKind::beta;
    if (name == "gamma") return KernelKind::gamma;
    throw Error(ErrorKind::parse, "unknown kernel '" + name + "' (expected gaussian, beta or gamma)");
}

std::string to_string(KernelKind kind) {
    switch (kind) {
        case KernelKind::gaussian: return "gaussian";
        case KernelKind::beta: return "beta";
        case KernelKind::gamma: return "gamma";
    }
    return "?";
}

Domain kernel_parameter_domain(KernelKind kind) {
    switch (kind) {
        case KernelKind::gaussian: return Domain::real_line();
        case KernelKind::beta: return Domain(0.0, 1.0);
        case KernelKind::gamma: return Domain(0.0, kInf);
    }
    return {};
}

bool in_sample_space(KernelKind kind, double y) {
    switch (kind) {
        case KernelKind::gaussian: return std::isfinite(y);
        case KernelKind::beta: return y > 0.0 && y < 1.0;
        case KernelKind::gamma: return y > 0.0 && std::isfinite(y);
    }
    return false;
}

double log_kernel(KernelKind kind, double y, double theta, double phi) {
    if (!(phi > 0.0) || !std::isfinite(phi)) throw DomainError("kernel dispersion must be positive and finite");
    if (!in_sample_space(kind, y)) throw DomainError("observation outside the kernel's sample space");
    switch (kind) {
        case KernelKind::gaussian: {
            if (!std::isfinite(theta)) throw DomainError("gaussian mean must be finite");
            const double r = y - theta;
            return -0.5 * std::log(2.0 * std::numbers::pi * phi) - r * r / (2.0 * phi);
        }
        case KernelKind::beta: {
            if (!(theta > 0.0 && theta < 1.0)) throw DomainError("beta mean must lie in (0,1)");
            const double a = theta * phi;
            const double b = (1.0 - theta) * phi;
            return std::lgamma(phi) - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * std::log(y) +
                   (b - 1.0) * std::log1p(-y);
        }
        case KernelKind::gamma: {
            if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("gamma mean must be positive");
            const double rate = phi / theta;
            return phi * std::log(rate) - std::lgamma(phi) + (phi - 1.0) * std::log(y) - rate * y;
        }
    }
    return -std::numeric_limits<double>::infinity();
}

double mixture_logpdf(KernelKind kind, const JointDiscreteMeasure& mixing, double y) {
    std::vector<double> terms;
    terms.reserve(mixing.size());
    for (const auto& atom : mixing.atoms()) {
        if (atom.weight <= 0.0) continue;
        terms.push_back(std::log(atom.weight) + log_kernel(kind, y, atom.theta, atom.phi));
    }
    return log_sum_exp(terms);
}

std::vector<double> density_grid(KernelKind kind, const JointDiscreteMeasure& mixing,
                                 std::span<const double> grid) {
    std::vector<double> out;
    out.reserve(grid.size());
    for (double y : grid) out.push_back(std::exp(mixture_logpdf(kind, mixing, y)));
    return out;
}

}  // namespace sba
