#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "betaf/grouped.hpp"

namespace betaf {

struct FitResult;

struct FitMetrics {
    double sse = 0.0;
    double sae = 0.0;
    double chi_square = 0.0;
    // Model mean; empty when the moment does not exist.
    std::optional<double> est_mean;
    // Sample mean from group means, when those are present.
    std::optional<double> empirical_mean;
};

// SSE and SAE between n_i/N and P_i, Pearson chi-square with expected counts
// N P_i, and the model mean (closed form when available, else quadrature).
// Throws MetricError when an occupied cell has zero model probability.
FitMetrics compute_metrics(const BetaFDistribution& d, const GroupedSample& s, double quad_tol = 1e-8);

// Row per family in the fixed order GB1, GB2, BN, skew-t, Log-F, BE, BW.
struct ComparisonTable {
    static constexpr std::array<const char*, 9> kColumns = {"family", "alpha", "beta", "a", "b",
                                                            "est_mean", "1000*SSE", "SAE", "chi2"};
    struct Row {
        KernelFamily family;
        // alpha, beta, a, b, est_mean, 1000*SSE, SAE, chi2; empty cells for
        // parameters the family does not have.
        std::array<std::optional<double>, 8> values;
    };
    std::vector<Row> rows;

    std::string to_text() const;
};

ComparisonTable comparison_table(std::span<const FitResult> results, const GroupedSample& s);

}  // namespace betaf
