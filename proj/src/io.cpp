#include "betaf/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "betaf/error.hpp"

namespace betaf {
namespace {

using Json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = line.find(',', pos);
        out.push_back(trim(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

double parse_real(std::string_view field, std::size_t line, const char* what) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (!field.empty() && field.front() == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (field.empty() || ec != std::errc() || ptr != last || std::isnan(v))
        throw ParseError(std::string("bad ") + what + " '" + std::string(field) + "'", line);
    return v;
}

std::uint64_t parse_count(std::string_view field, std::size_t line) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError("bad count '" + std::string(field) + "'", line);
    return v;
}

// Shortest round-trip text; plain decimals for everyday magnitudes.
std::string number(double v) {
    char buf[512];
    const double a = std::fabs(v);
    const bool plain = a == 0.0 || (a >= 1e-4 && a < 1e15);
    const auto res = plain ? std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed)
                           : std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Grid point k printed to 12 significant digits and read back, so the
// evaluated x is exactly the x in the file.
double grid_point(const GridSpec& grid, std::size_t k) {
    char buf[64];
    const int len = std::snprintf(buf, sizeof buf, "%.12g", grid.start + static_cast<double>(k) * grid.step);
    double x = 0.0;
    std::from_chars(buf, buf + len, x);
    return x;
}

std::string slurp(const std::string& path) {
    if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Json optional_number(const std::optional<double>& v) {
    return v ? Json(*v) : Json(nullptr);
}

}  // namespace

GroupedSample parse_grouped_csv(std::string_view text, double unit_scale) {
    if (!(unit_scale > 0.0) || !std::isfinite(unit_scale)) throw DomainError("unit_scale must be positive");
    struct Row {
        double lower, upper;
        std::uint64_t count;
        double mean;
        std::size_t line;
    };
    std::vector<Row> rows;
    std::optional<bool> with_means;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        const std::string_view line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_commas(line);
        if (!with_means) {
            if (line == "lower,upper,count")
                with_means = false;
            else if (line == "lower,upper,count,group_mean")
                with_means = true;
            else
                throw ParseError("expected header 'lower,upper,count[,group_mean]'", line_no);
            continue;
        }
        const std::size_t want = *with_means ? 4 : 3;
        if (fields.size() != want)
            throw ParseError("expected " + std::to_string(want) + " fields, got " + std::to_string(fields.size()), line_no);
        Row r{parse_real(fields[0], line_no, "lower"), parse_real(fields[1], line_no, "upper"),
              parse_count(fields[2], line_no), *with_means ? parse_real(fields[3], line_no, "group_mean") : 0.0,
              line_no};
        rows.push_back(r);
    }
    if (!with_means) throw ParseError("empty file", line_no);
    if (rows.size() < 2) throw SchemaError("need at least two bins");

    GroupedSample s;
    s.unit_scale = unit_scale;
    if (*with_means) s.group_means.emplace();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        const std::string where = " (line " + std::to_string(r.line) + ")";
        if (!(r.upper > r.lower)) throw SchemaError("upper must exceed lower" + where);
        if (i > 0 && r.lower != rows[i - 1].upper) throw SchemaError("bins are not contiguous" + where);
        if (r.lower == std::numeric_limits<double>::infinity() || (i > 0 && std::isinf(r.lower)))
            throw SchemaError("only the first lower may be -inf" + where);
        if (std::isinf(r.upper) && i + 1 != rows.size()) throw SchemaError("only the last upper may be inf" + where);
        if (i == 0) s.edges.push_back(r.lower / unit_scale);
        s.edges.push_back(r.upper / unit_scale);
        s.counts.push_back(r.count);
        if (s.group_means) s.group_means->push_back(r.mean / unit_scale);
    }
    s.validate_layout();
    return s;
}

GroupedSample read_grouped_csv(const std::string& path, double unit_scale) {
    return parse_grouped_csv(slurp(path), unit_scale);
}

std::string format_grouped_csv(const GroupedSample& s) {
    s.validate_layout();
    std::string out = s.group_means ? "lower,upper,count,group_mean\n" : "lower,upper,count\n";
    for (std::size_t i = 0; i < s.cells(); ++i) {
        out += number(s.edges[i] * s.unit_scale) + ',' + number(s.edges[i + 1] * s.unit_scale) + ',' +
               std::to_string(s.counts[i]);
        if (s.group_means) out += ',' + number((*s.group_means)[i] * s.unit_scale);
        out += '\n';
    }
    return out;
}

void write_grouped_csv(const GroupedSample& s, const std::string& path) { write_text(format_grouped_csv(s), path); }

std::string report_json(std::span<const FitResult> results, const GroupedSample& s,
                        std::span<const FitFailure> failures) {
    Json doc;
    Json sample;
    sample["cells"] = s.cells();
    sample["total"] = s.total();
    sample["unit_scale"] = s.unit_scale;
    sample["empirical_mean"] = s.group_means && s.total() > 0 ? Json(empirical_mean(s)) : Json(nullptr);
    doc["sample"] = sample;

    Json families = Json::array();
    for (KernelFamily fam : kAllFamilies) {
        for (const FitResult& r : results) {
            if (r.family != fam) continue;
            Json e;
            e["family"] = family_name(r.family);
            e["alpha"] = r.shapes.alpha;
            e["beta"] = r.shapes.beta;
            e["theta_f"] = r.theta_f.values;
            e["loglik"] = r.loglik;
            e["converged"] = r.converged;
            e["iterations"] = r.iterations;
            e["grad_norm"] = r.grad_norm;
            e["start_index"] = r.start_index;
            e["cap_hit"] = r.cap_hit;
            e["message"] = r.message;
            e["est_mean"] = optional_number(r.metrics.est_mean);
            e["empirical_mean"] = optional_number(r.metrics.empirical_mean);
            e["sse"] = r.metrics.sse;
            e["sae"] = r.metrics.sae;
            e["chi_square"] = r.metrics.chi_square;
            families.push_back(std::move(e));
        }
        for (const FitFailure& f : failures) {
            if (f.family != fam) continue;
            Json e;
            e["family"] = family_name(f.family);
            for (const char* key : {"alpha", "beta", "theta_f", "loglik"}) e[key] = nullptr;
            e["converged"] = false;
            e["message"] = f.message;
            for (const char* key : {"est_mean", "empirical_mean", "sse", "sae", "chi_square"}) e[key] = nullptr;
            families.push_back(std::move(e));
        }
    }
    doc["families"] = std::move(families);

    Json table;
    table["columns"] = ComparisonTable::kColumns;
    Json rows = Json::array();
    if (!results.empty()) {
        for (const auto& row : comparison_table(results, s).rows) {
            Json line = Json::array({family_label(row.family)});
            for (const auto& v : row.values) line.push_back(optional_number(v));
            rows.push_back(std::move(line));
        }
    }
    table["rows"] = std::move(rows);
    doc["table"] = std::move(table);
    return doc.dump(2) + "\n";
}

void write_report(std::span<const FitResult> results, const GroupedSample& s, const std::string& path,
                  std::span<const FitFailure> failures) {
    write_text(report_json(results, s, failures), path);
}

std::size_t GridSpec::points() const {
    validate();
    return static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
}

void GridSpec::validate() const {
    if (!std::isfinite(start) || !std::isfinite(stop) || !(stop >= start))
        throw DomainError("density grid needs finite start <= stop");
    if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("density grid step must be positive");
    if ((stop - start) / step > 1e7) throw DomainError("density grid has too many points");
}

std::string density_curve_csv(const BetaFDistribution& d, const GridSpec& grid) {
    const std::size_t n = grid.points();
    std::string out = "x,pdf,cdf\n";
    for (std::size_t k = 0; k < n; ++k) {
        const double x = grid_point(grid, k);
        out += number(x) + ',' + number(d.pdf(x)) + ',' + number(d.cdf(x)) + '\n';
    }
    return out;
}

void write_density_curve(const BetaFDistribution& d, const GridSpec& grid, const std::string& path) {
    write_text(density_curve_csv(d, grid), path);
}

void write_text(std::string_view text, const std::string& path) {
    if (path == "-") {
        std::cout << text;
        std::cout.flush();
        if (!std::cout) throw IoError("cannot write to stdout");
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.close();
    if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace betaf
