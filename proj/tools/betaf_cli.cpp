// betaf: fit beta-F income distributions to grouped data.
//
//   betaf fit --data groups.csv --family gb2 --out report.json
//   betaf compare --data groups.csv --out table
//   betaf density --family gb2 --params 0.49,1.111,2.724,8.297 --out curve.csv
//   betaf simulate --family be --params 1.7,0.8,0.26 --n 100000 --edges 0,1,2,5,10 --out groups.csv
//
// Exit status: 0 success, 1 input error, 2 a fit did not converge.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "betaf/betaf.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotConverged = 2;

struct InputError {
    std::string message;
};

void check(betaf_status st) {
    if (st != BETAF_OK) throw InputError{std::string(betaf_status_name(st)) + ": " + betaf_last_error()};
}

struct DistDeleter {
    void operator()(betaf_dist* d) const { betaf_dist_free(d); }
};
struct SampleDeleter {
    void operator()(betaf_sample* s) const { betaf_sample_free(s); }
};
struct ReportDeleter {
    void operator()(betaf_report* r) const { betaf_report_free(r); }
};
using DistPtr = std::unique_ptr<betaf_dist, DistDeleter>;
using SamplePtr = std::unique_ptr<betaf_sample, SampleDeleter>;
using ReportPtr = std::unique_ptr<betaf_report, ReportDeleter>;

betaf_family family_from(const std::string& name) {
    betaf_family f{};
    check(betaf_family_parse(name.c_str(), &f));
    return f;
}

DistPtr make_dist(const std::string& family, const std::vector<double>& params) {
    betaf_dist* d = nullptr;
    check(betaf_dist_create(family_from(family), params.data(), params.size(), &d));
    return DistPtr(d);
}

SamplePtr load_sample(const std::string& path, double unit_scale) {
    betaf_sample* s = nullptr;
    check(betaf_sample_read_csv(path.c_str(), unit_scale, &s));
    return SamplePtr(s);
}

// One start per non-empty line; values separated by commas or whitespace.
std::vector<double> read_starts(const std::string& path, std::size_t width, std::size_t& rows) {
    std::ifstream in(path);
    if (!in) throw InputError{"cannot open starts file '" + path + "'"};
    std::vector<double> flat;
    rows = 0;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream fields(line);
        std::vector<double> row;
        std::string tok;
        while (fields >> tok) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw InputError{"starts line " + std::to_string(line_no) + ": bad number '" + tok + "'"};
            }
        }
        if (row.empty()) continue;
        if (row.size() != width)
            throw InputError{"starts line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                             " values, got " + std::to_string(row.size())};
        flat.insert(flat.end(), row.begin(), row.end());
        ++rows;
    }
    if (rows == 0) throw InputError{"starts file '" + path + "' has no starts"};
    return flat;
}

struct FitFlags {
    std::string data;
    double unit_scale = 10000.0;
    double tol = 1e-6;
    int max_iter = 500;
    std::string hessian = "bfgs";
};

void add_fit_flags(CLI::App* cmd, FitFlags& f) {
    cmd->add_option("--data", f.data, "grouped CSV (lower,upper,count[,group_mean])")->required();
    cmd->add_option("--unit-scale", f.unit_scale, "currency units per model unit")->capture_default_str();
    cmd->add_option("--tol", f.tol, "gradient tolerance on the mean log-likelihood")->capture_default_str();
    cmd->add_option("--max-iter", f.max_iter, "iteration limit per start")->capture_default_str();
    cmd->add_option("--hessian", f.hessian, "bfgs or fd")
        ->check(CLI::IsMember({"bfgs", "fd"}))
        ->capture_default_str();
}

betaf_config make_config(const FitFlags& f) {
    betaf_config cfg;
    betaf_config_default(&cfg);
    cfg.grad_tol = f.tol;
    cfg.max_iter = f.max_iter;
    cfg.hessian_mode = f.hessian == "fd" ? BETAF_HESSIAN_FINITE_DIFFERENCE : BETAF_HESSIAN_BFGS;
    if (const char* env = std::getenv("BETAF_QUAD_TOL"); env && *env) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (*end != '\0' || !(v > 0.0)) throw InputError{std::string("BETAF_QUAD_TOL: bad value '") + env + "'"};
        cfg.quad_tol = v;
    }
    return cfg;
}

void report_failures(const betaf_report* r) {
    for (std::size_t i = 0; i < betaf_report_count(r); ++i) {
        betaf_fit_summary e{};
        check(betaf_report_entry(r, i, &e));
        if (!e.ok || !e.converged)
            std::cerr << "betaf: " << betaf_family_name(e.family) << " did not converge: " << e.message << '\n';
    }
}

std::string text_path_for(const std::string& out) {
    const auto slash = out.find_last_of('/');
    const auto dot = out.find_last_of('.');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) return out.substr(0, dot) + ".txt";
    return out + ".txt";
}

int cmd_fit(const FitFlags& flags, const std::string& family, const std::string& starts, const std::string& out) {
    const betaf_family fam = family_from(family);
    const SamplePtr s = load_sample(flags.data, flags.unit_scale);
    betaf_config cfg = make_config(flags);
    std::vector<double> flat;
    if (starts != "auto") {
        flat = read_starts(starts, betaf_family_param_count(fam), cfg.n_starts);
        cfg.starts = flat.data();
    }
    betaf_report* raw = nullptr;
    check(betaf_fit(s.get(), &fam, 1, &cfg, &raw));
    const ReportPtr r(raw);
    check(betaf_report_write_json(r.get(), out.c_str()));
    report_failures(r.get());
    return betaf_report_all_converged(r.get()) ? kExitOk : kExitNotConverged;
}

int cmd_compare(const FitFlags& flags, const std::string& out) {
    const SamplePtr s = load_sample(flags.data, flags.unit_scale);
    const betaf_config cfg = make_config(flags);
    std::vector<betaf_family> all;
    for (int i = 0; i < BETAF_FAMILY_COUNT; ++i) all.push_back(static_cast<betaf_family>(i));
    betaf_report* raw = nullptr;
    check(betaf_fit(s.get(), all.data(), all.size(), &cfg, &raw));
    const ReportPtr r(raw);
    if (out == "-") {
        check(betaf_report_write_table(r.get(), "-"));
    } else {
        check(betaf_report_write_json(r.get(), out.c_str()));
        check(betaf_report_write_table(r.get(), text_path_for(out).c_str()));
    }
    report_failures(r.get());
    return betaf_report_all_converged(r.get()) ? kExitOk : kExitNotConverged;
}

int cmd_density(const std::string& family, const std::vector<double>& params, double start, double stop, double step,
                const std::string& out) {
    const DistPtr d = make_dist(family, params);
    check(betaf_dist_write_density(d.get(), start, stop, step, out.c_str()));
    return kExitOk;
}

int cmd_simulate(const std::string& family, const std::vector<double>& params, std::size_t n,
                 const std::vector<double>& edges, std::uint64_t seed, double unit_scale, const std::string& out) {
    const DistPtr d = make_dist(family, params);
    betaf_sample* raw = nullptr;
    check(betaf_sample_simulate(d.get(), n, edges.data(), edges.size(), seed, unit_scale, &raw));
    const SamplePtr s(raw);
    check(betaf_sample_write_csv(s.get(), out.c_str()));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized beta-F income distributions fitted to grouped data"};
    app.require_subcommand(1);

    FitFlags fit_flags;
    std::string family;
    std::string starts = "auto";
    std::string out = "-";
    auto* fit = app.add_subcommand("fit", "fit one family and write a JSON report");
    add_fit_flags(fit, fit_flags);
    fit->add_option("--family", family, "gb1, gb2, bn, skewt, logf, be or bw")->required();
    fit->add_option("--starts", starts, "'auto' or a file with one start per line")->capture_default_str();
    fit->add_option("--out", out, "report path, '-' for stdout")->capture_default_str();

    FitFlags cmp_flags;
    std::string cmp_out = "-";
    auto* compare = app.add_subcommand("compare", "fit all seven families and tabulate the fits");
    add_fit_flags(compare, cmp_flags);
    compare->add_option("--out", cmp_out, "JSON path (table goes next to it as .txt); '-' prints the table")
        ->capture_default_str();

    std::string d_family;
    std::vector<double> d_params;
    double d_start = 0.0;
    double d_stop = 30.0;
    double d_step = 0.1;
    std::string d_out = "-";
    auto* density = app.add_subcommand("density", "write x,pdf,cdf on a grid");
    density->add_option("--family", d_family, "family name")->required();
    density->add_option("--params", d_params, "alpha,beta,theta_F...")->delimiter(',')->required();
    density->add_option("--start", d_start, "first grid point")->capture_default_str();
    density->add_option("--stop", d_stop, "last grid point")->capture_default_str();
    density->add_option("--step", d_step, "grid spacing")->capture_default_str();
    density->add_option("--out", d_out, "CSV path, '-' for stdout")->capture_default_str();

    std::string s_family;
    std::vector<double> s_params;
    std::size_t s_n = 0;
    std::vector<double> s_edges;
    std::uint64_t s_seed = 1;
    double s_unit_scale = 10000.0;
    std::string s_out = "-";
    auto* simulate = app.add_subcommand("simulate", "draw a sample and write it as grouped CSV");
    simulate->add_option("--family", s_family, "family name")->required();
    simulate->add_option("--params", s_params, "alpha,beta,theta_F...")->delimiter(',')->required();
    simulate->add_option("--n", s_n, "number of draws")->required();
    simulate->add_option("--edges", s_edges, "bin edges in model units; an open last bin is added")
        ->delimiter(',')
        ->required();
    simulate->add_option("--seed", s_seed, "random seed")->capture_default_str();
    simulate->add_option("--unit-scale", s_unit_scale, "currency units per model unit")->capture_default_str();
    simulate->add_option("--out", s_out, "CSV path, '-' for stdout")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*fit) return cmd_fit(fit_flags, family, starts, out);
        if (*compare) return cmd_compare(cmp_flags, cmp_out);
        if (*density) return cmd_density(d_family, d_params, d_start, d_stop, d_step, d_out);
        if (*simulate) return cmd_simulate(s_family, s_params, s_n, s_edges, s_seed, s_unit_scale, s_out);
    } catch (const InputError& e) {
        std::cerr << "betaf: " << e.message << '\n';
        return kExitInput;
    }
    return kExitInput;
}
