#include "josh/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace josh {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Ascending series sum_m (kappa/2)^(order+2m) / (m! Gamma(order+m+1)),
// accumulated in log space. All terms are positive, so there is no
// cancellation; terms start shrinking once m(order+m) > (kappa/2)^2.
double series_log_bessel(double order, double kappa) {
    const double log_half = std::log(kappa / 2.0);
    double log_term = order * log_half - std::lgamma(order + 1.0);
    double log_sum = log_term;
    for (int m = 1; m < 200000; ++m) {
        log_term += 2.0 * log_half - std::log(static_cast<double>(m)) -
                    std::log(order + m);
        if (log_term <= log_sum)
            log_sum += std::log1p(std::exp(log_term - log_sum));
        else
            log_sum = log_term + std::log1p(std::exp(log_sum - log_term));
        const double ratio =
            (kappa * kappa / 4.0) / ((m + 1.0) * (order + m + 1.0));
        if (ratio < 0.9 && log_term - log_sum < -46.0) break;
    }
    return log_sum;
}

// Large-argument expansion I_nu(k) ~ e^k / sqrt(2 pi k) * sum_j t_j,
// t_0 = 1, t_j = -t_{j-1} (mu - (2j-1)^2) / (8 k j), mu = 4 nu^2.
// Only called where the leading terms decay (kappa >= nu^2/2 + 30, or
// nu < 1 with kappa >= 20).
double hankel_log_bessel(double order, double kappa) {
    const double mu = 4.0 * order * order;
    double term = 1.0, sum = 1.0;
    double prev = std::numeric_limits<double>::max();
    for (int j = 1; j <= 64; ++j) {
        const double odd = 2.0 * j - 1.0;
        term *= -(mu - odd * odd) / (8.0 * kappa * j);
        if (std::abs(term) >= prev) break;  // asymptotic tail turned around
        prev = std::abs(term);
        sum += term;
        if (std::abs(term) < 1e-17 * sum) break;
    }
    return kappa - 0.5 * std::log(2.0 * M_PI * kappa) + std::log(sum);
}

// I_mu(kappa) / I_{mu-1}(kappa) by the continued fraction
// 1/(b1 + 1/(b2 + ...)), b_j = 2(mu + j - 1)/kappa (modified Lentz).
double bessel_ratio_cf(double mu, double kappa) {
    const double tiny = 1e-300;
    double f = tiny, c = tiny, d = 0.0;
    for (long j = 1; j < 40000000; ++j) {
        const double b = 2.0 * (mu + j - 1) / kappa;
        d = b + d;
        if (d == 0.0) d = tiny;
        c = b + 1.0 / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return f;
}

// Mid zone (kappa >= max(order, 20) but not large against order^2):
// start from the fractional order, where the large-argument expansion is
// safe, then climb with the three-term recurrence. One continued
// fraction gives the ratio at the top; stepping the recurrence downward
// is the stable direction and yields every intermediate ratio.
double ratio_chain_log_bessel(double order, double kappa) {
    const double base = order - std::floor(order);
    const int steps = static_cast<int>(std::llround(order - base));
    const double log_base = hankel_log_bessel(base, kappa);
    if (steps == 0) return log_base;
    double ratio_above = bessel_ratio_cf(order + 1.0, kappa);
    double log_ratios = 0.0;
    for (int j = steps; j >= 1; --j) {
        const double nu = base + j;
        const double r = 1.0 / (2.0 * nu / kappa + ratio_above);
        log_ratios += std::log(r);
        ratio_above = r;
    }
    return log_base + log_ratios;
}

}  // namespace

double log_bessel_i(double order, double kappa) {
    if (kappa < 0.0)
        throw std::domain_error("log_bessel_i: kappa must be non-negative");
    if (order < 0.0)
        throw std::domain_error("log_bessel_i: order must be non-negative");
    if (kappa == 0.0)
        return order == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    if (kappa < std::max(order, 20.0)) return series_log_bessel(order, kappa);
    if (kappa >= 0.5 * order * order + 30.0)
        return hankel_log_bessel(order, kappa);
    return ratio_chain_log_bessel(order, kappa);
}

double log_vmf_normalizer(int dim, double kappa) {
    if (dim < 2)
        throw std::domain_error("log_vmf_normalizer: dim must be >= 2");
    if (kappa < 0.0)
        throw std::domain_error("log_vmf_normalizer: kappa must be non-negative");
    const double p = dim;
    if (kappa == 0.0)  // reciprocal surface area of S^(p-1)
        return std::lgamma(p / 2.0) - std::log(2.0) - (p / 2.0) * std::log(M_PI);
    const double nu = p / 2.0 - 1.0;
    return nu * std::log(kappa) - (p / 2.0) * kLog2Pi - log_bessel_i(nu, kappa);
}

double log_vmf_density(std::span<const double> x, std::span<const double> mean,
                       double kappa) {
    if (x.size() != mean.size())
        throw std::invalid_argument("log_vmf_density: dimension mismatch");
    return log_vmf_normalizer(static_cast<int>(x.size()), kappa) +
           kappa * dot(x, mean);
}

double log_vmf_density(std::span<const double> x, const VmfParams& params) {
    return log_vmf_density(x, params.mean, params.kappa);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::vector<double> project_to_tangent(std::span<const double> theta,
                                       std::span<const double> grad) {
    if (theta.size() != grad.size())
        throw std::invalid_argument("project_to_tangent: dimension mismatch");
    const double radial = dot(theta, grad);
    std::vector<double> out(grad.size());
    for (size_t i = 0; i < grad.size(); ++i)
        out[i] = grad[i] - radial * theta[i];
    return out;
}

std::vector<double> retract(std::span<const double> x,
                            std::span<const double> step) {
    if (x.size() != step.size())
        throw std::invalid_argument("retract: dimension mismatch");
    std::vector<double> out(x.size());
    double nrm2 = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        out[i] = x[i] + step[i];
        nrm2 += out[i] * out[i];
    }
    if (nrm2 < 1e-24)
        throw std::domain_error("retract: x + step is the zero vector");
    const double inv = 1.0 / std::sqrt(nrm2);
    for (double& v : out) v *= inv;
    return out;
}

}  // namespace josh
