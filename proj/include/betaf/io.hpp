#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "betaf/fit.hpp"
#include "betaf/grouped.hpp"

namespace betaf {

// Grouped CSV: header `lower,upper,count` or `lower,upper,count,group_mean`,
// one row per bin in currency units. The first lower may be -inf (or 0), the
// last upper may be inf. Values are divided by unit_scale on the way in.
// A path of "-" means stdin/stdout throughout this header.
GroupedSample parse_grouped_csv(std::string_view text, double unit_scale = 10000.0);
GroupedSample read_grouped_csv(const std::string& path, double unit_scale = 10000.0);
std::string format_grouped_csv(const GroupedSample& s);
void write_grouped_csv(const GroupedSample& s, const std::string& path);

// A family whose fit threw instead of returning a result.
struct FitFailure {
    KernelFamily family;
    std::string message;
};

// JSON report: sample summary, one `families` entry per result (failures
// included with null numbers), and the comparison table.
std::string report_json(std::span<const FitResult> results, const GroupedSample& s,
                        std::span<const FitFailure> failures = {});
void write_report(std::span<const FitResult> results, const GroupedSample& s, const std::string& path,
                  std::span<const FitFailure> failures = {});

// x = start + k * step for k = 0 .. floor((stop - start) / step).
struct GridSpec {
    double start = 0.0;
    double stop = 30.0;
    double step = 0.1;

    std::size_t points() const;
    void validate() const;
};

std::string density_curve_csv(const BetaFDistribution& d, const GridSpec& grid);
void write_density_curve(const BetaFDistribution& d, const GridSpec& grid, const std::string& path);

void write_text(std::string_view text, const std::string& path);

}  // namespace betaf
