#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "betaf/grouped.hpp"
#include "betaf/metrics.hpp"

namespace betaf {

enum class HessianMode {
    finite_difference,
    bfgs_accumulated,
};

struct OptimizerConfig {
    // Infinity norm of the gradient of the mean log-likelihood (L / N) on
    // the unconstrained scale.
    double grad_tol = 1e-6;
    double step_tol = 1e-10;
    int max_iter = 500;
    // Starting points (alpha, beta, theta_F...); empty means auto_starts().
    std::vector<std::vector<double>> starts;
    HessianMode hessian_mode = HessianMode::bfgs_accumulated;
    // Bound on |u| for the log-scale coordinates (locations are left free).
    double coordinate_cap = 30.0;
    // Relative tolerance of the quadrature mean reported in the metrics.
    double quad_tol = 1e-8;

    void validate() const;
};

struct FitResult {
    KernelFamily family = KernelFamily::gb2_burr;
    BetaShapes shapes;
    ThetaF theta_f;
    double loglik = 0.0;
    bool converged = false;
    int iterations = 0;
    double grad_norm = 0.0;
    std::size_t start_index = 0;
    // Some unconstrained coordinate ended on the |u| cap.
    bool cap_hit = false;
    std::string message;
    // Log-likelihood after every accepted step of the winning start.
    std::vector<double> trace;
    FitMetrics metrics;

    BetaFDistribution distribution() const { return {shapes, family, theta_f}; }
    std::vector<double> params() const;
};

// Maps (alpha, beta, theta_F...) to an unconstrained vector: log for
// positive coordinates, identity for locations, and
// b = x_max * (1 + e^u) for the GB1 upper end.
class ParameterTransform {
public:
    ParameterTransform(KernelFamily family, double x_max_finite);

    std::vector<double> to_unconstrained(std::span<const double> params) const;
    std::vector<double> from_unconstrained(std::span<const double> u) const;
    // d params / d u (the map is coordinate-wise).
    std::vector<double> jacobian(std::span<const double> u) const;

private:
    enum class Kind { log, identity, shifted_exp };
    KernelFamily family_;
    double x_max_;
    std::vector<Kind> kinds_;
};

// Starting points: a moment-matched start with alpha = beta = 1 first, then
// each coordinate halved and doubled in turn (plus a mean-matched start for
// the skew-t).
std::vector<std::vector<double>> auto_starts(KernelFamily family, const GroupedSample& s);

// Multi-start maximum likelihood. Returns the best converged start (ties go
// to the lowest index) or, when none converged, the best start flagged
// converged = false. Throws FitError if every start has a non-finite
// likelihood. Metrics are filled in.
FitResult fit_family(KernelFamily family, const GroupedSample& s, const OptimizerConfig& cfg = {});

}  // namespace betaf
