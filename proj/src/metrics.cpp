#include "betaf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "betaf/error.hpp"
#include "betaf/fit.hpp"

namespace betaf {
namespace {

std::optional<double> model_mean(const BetaFDistribution& d, double quad_tol) {
    try {
        if (const auto m = d.mean_analytic()) return m;
        return d.moment_quadrature(1, quad_tol);
    } catch (const NonexistenceError&) {
        return std::nullopt;
    } catch (const NumericError&) {
        return std::nullopt;
    }
}

std::string format_cell(const std::optional<double>& v) {
    if (!v) return "-";
    char buf[64];
    const double a = std::fabs(*v);
    if (a != 0.0 && (a >= 1e6 || a < 1e-3))
        std::snprintf(buf, sizeof buf, "%.4e", *v);
    else
        std::snprintf(buf, sizeof buf, "%.4f", *v);
    return buf;
}

}  // namespace

FitMetrics compute_metrics(const BetaFDistribution& d, const GroupedSample& s, double quad_tol) {
    s.validate();
    const CellProbabilities p = cell_probs(d, s);
    const double n = static_cast<double>(s.total());
    FitMetrics out;
    for (std::size_t i = 0; i < s.cells(); ++i) {
        const double pi = p.probs[i];
        if (s.counts[i] > 0 && !(pi > 0.0))
            throw MetricError("occupied cell " + std::to_string(i) + " has zero model probability", i);
        const double diff = static_cast<double>(s.counts[i]) / n - pi;
        out.sse += diff * diff;
        out.sae += std::fabs(diff);
        if (pi > 0.0) {
            const double expected = n * pi;
            const double dev = static_cast<double>(s.counts[i]) - expected;
            out.chi_square += dev * dev / expected;
        }
    }
    out.est_mean = model_mean(d, quad_tol);
    if (s.group_means) out.empirical_mean = empirical_mean(s);
    return out;
}

std::string ComparisonTable::to_text() const {
    std::vector<std::vector<std::string>> cells;
    cells.emplace_back(kColumns.begin(), kColumns.end());
    for (const Row& row : rows) {
        std::vector<std::string> line = {std::string(family_label(row.family))};
        for (const auto& v : row.values) line.push_back(format_cell(v));
        cells.push_back(std::move(line));
    }
    std::vector<std::size_t> width(kColumns.size(), 0);
    for (const auto& line : cells)
        for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());

    std::string out;
    for (const auto& line : cells) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            const std::string pad(width[c] - line[c].size(), ' ');
            if (c == 0)
                out += line[c] + pad;
            else
                out += "  " + pad + line[c];
        }
        out += '\n';
    }
    return out;
}

ComparisonTable comparison_table(std::span<const FitResult> results, const GroupedSample& s) {
    (void)s;
    if (results.empty()) throw DomainError("comparison table needs at least one fit result");
    ComparisonTable table;
    for (KernelFamily fam : kAllFamilies) {
        for (const FitResult& r : results) {
            if (r.family != fam) continue;
            ComparisonTable::Row row{fam, {}};
            row.values[0] = r.shapes.alpha;
            row.values[1] = r.shapes.beta;
            if (r.theta_f.size() > 0) row.values[2] = r.theta_f[0];
            if (r.theta_f.size() > 1) row.values[3] = r.theta_f[1];
            row.values[4] = r.metrics.est_mean;
            row.values[5] = 1000.0 * r.metrics.sse;
            row.values[6] = r.metrics.sae;
            row.values[7] = r.metrics.chi_square;
            table.rows.push_back(row);
        }
    }
    return table;
}

}  // namespace betaf
