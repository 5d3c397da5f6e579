#pragma once

#include <span>
#include <vector>

namespace josh {

// log I_order(kappa), the modified Bessel function of the first kind.
// Evaluated in log space so it stays finite for kappa up to 1e6 and
// order up to 500. Throws std::domain_error on negative arguments.
double log_bessel_i(double order, double kappa);

// log n_p(kappa) of the vMF normalizer,
//   n_p(kappa) = kappa^(p/2-1) / ((2 pi)^(p/2) I_{p/2-1}(kappa)).
// kappa = 0 returns the uniform-density limit, the reciprocal surface
// area of S^(p-1). Throws std::domain_error for dim < 2 or kappa < 0.
double log_vmf_normalizer(int dim, double kappa);

struct VmfParams {
    std::vector<double> mean;  // unit direction
    double kappa = 0.0;

    int dim() const { return static_cast<int>(mean.size()); }
};

// log f(x; mean, kappa) = log n_p(kappa) + kappa <x, mean>
double log_vmf_density(std::span<const double> x, std::span<const double> mean,
                       double kappa);
double log_vmf_density(std::span<const double> x, const VmfParams& params);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

// Riemannian gradient on the sphere: grad - <theta, grad> theta
std::vector<double> project_to_tangent(std::span<const double> theta,
                                       std::span<const double> grad);

// First-order retraction (x + step) / ||x + step||. Throws
// std::domain_error when x + step is the zero vector.
std::vector<double> retract(std::span<const double> x,
                            std::span<const double> step);

}  // namespace josh
