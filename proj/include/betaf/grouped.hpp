#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "betaf/family.hpp"

namespace betaf {

// Income groups: bins [x_{i-1}, x_i) with frequencies and optional group
// means. Edges and means are in model units (currency / unit_scale).
struct GroupedSample {
    std::vector<double> edges;
    std::vector<std::uint64_t> counts;
    std::optional<std::vector<double>> group_means;
    double unit_scale = 1.0;

    std::size_t cells() const { return counts.size(); }
    std::uint64_t total() const;
    std::size_t occupied_cells() const;
    // Largest finite edge; used to keep GB1's upper end beyond the data.
    double largest_finite_edge() const;

    // Throws SchemaError/DomainError when an invariant is broken: r >= 2,
    // strictly increasing edges, N > 0, means inside their bins.
    void validate() const;
    // Same checks without requiring N > 0 (simulated files may be empty).
    void validate_layout() const;
};

struct CellProbabilities {
    std::vector<double> probs;
};

// Probabilities below this are clamped before taking logs.
inline constexpr double kProbabilityFloor = 1e-300;

// P_i = I_{F(x_i)} - I_{F(x_{i-1})} with F(x_0) := 0 and F(x_r) := 1.
CellProbabilities cell_probs(const BetaFDistribution& d, const GroupedSample& s);

struct LogLikelihood {
    double value = 0.0;
    // First occupied cell whose probability underflowed; value is -inf then.
    std::optional<std::size_t> underflow_cell;
};

// Sum n_i ln P_i (multinomial coefficient omitted).
LogLikelihood log_likelihood(const BetaFDistribution& d, const GroupedSample& s);

struct GradientOptions {
    // Relative tolerance of the per-cell shape-derivative integrals.
    double quad_tol = 1e-9;
};

// d(log-likelihood)/d(alpha, beta, theta_F...). Throws NumericError naming
// the cell when an occupied cell has (near) zero probability.
std::vector<double> log_likelihood_grad(const BetaFDistribution& d, const GroupedSample& s,
                                        const GradientOptions& opt = {});

// Central-difference gradient of the log-likelihood with one Richardson
// extrapolation step; used for the skew-t and as a quadrature fallback.
std::vector<double> log_likelihood_grad_fd(const BetaFDistribution& d, const GroupedSample& s,
                                           std::span<const std::size_t> coords = {});

// Sum n_i mu_i / N.
double empirical_mean(const GroupedSample& s);

// Draws n values from d and bins them by edges (last bin open-ended when the
// last edge is +inf). Group means are the within-bin sample means; empty bins
// get the bin midpoint (or the finite end of an open bin).
GroupedSample simulate_grouped(const BetaFDistribution& d, std::size_t n, std::vector<double> edges,
                               std::uint64_t seed, double unit_scale = 1.0);

}  // namespace betaf
