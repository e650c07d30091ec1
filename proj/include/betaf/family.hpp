#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "betaf/kernels.hpp"

namespace betaf {

// The generalized beta-F distribution: X = F^{-1}(Y) with Y ~ Beta(alpha, beta).
//
// Density g_F(x) = f(x) F(x)^(alpha-1) (1-F(x))^(beta-1) / B(alpha, beta),
// CDF I_{F(x)}(alpha, beta).
class BetaFDistribution {
public:
    BetaFDistribution(BetaShapes shapes, KernelFamily family, ThetaF theta_f);

    // Builds from the flat vector (alpha, beta, theta_F...).
    static BetaFDistribution from_params(KernelFamily family, std::span<const double> params);

    BetaShapes shapes() const { return shapes_; }
    KernelFamily family() const { return kernel_.family(); }
    const ThetaF& theta_f() const { return kernel_.theta_f(); }
    const Kernel& kernel() const { return kernel_; }
    // (alpha, beta, theta_F...)
    std::vector<double> params() const;
    Support support() const { return kernel_.support(); }

    double log_pdf(double x) const;
    double pdf(double x) const;
    TailPair cdf_pair(double x) const;
    double cdf(double x) const { return cdf_pair(x).lower; }
    double quantile(double p) const { return quantile(p, 1.0 - p); }
    double quantile(double p, double q) const;

    // Inverse-transform draws; reproducible for a given seed.
    std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

    // Closed-form mean where one exists (GB1, GB2, skew-t, BE) or the
    // tail-corrected series (BW); nullopt for BN and log-F. Throws
    // NonexistenceError when the family's existence condition fails.
    std::optional<double> mean_analytic() const;

    // n-th raw moment by adaptive quadrature of x^n g_F(x).
    double moment_quadrature(int n, double rel_tol = 1e-8) const;

private:
    BetaShapes shapes_;
    Kernel kernel_;
    double log_beta_;
};

// Uniform (0, 1) draw from the top 52 random bits; returns u and 1 - u exactly.
TailPair uniform_pair(std::uint64_t bits);

// Beta-Weibull raw moment E[X^n] from the alternating series, summed directly
// up to max_terms and completed with an integral tail estimate.
double beta_weibull_series_moment(double alpha, double beta, double rate, double shape, int n,
                                  int max_terms = 200);

}  // namespace betaf
