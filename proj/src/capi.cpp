#include "betaf/betaf.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <future>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "betaf/error.hpp"
#include "betaf/fit.hpp"
#include "betaf/io.hpp"

struct betaf_dist {
    betaf::BetaFDistribution d;
};

struct betaf_sample {
    betaf::GroupedSample s;
};

struct betaf_report {
    betaf::GroupedSample sample;
    std::vector<betaf::FitResult> results;
    std::vector<betaf::FitFailure> failures;
    // One entry per requested family, in family order.
    std::vector<betaf_fit_summary> entries;
    std::vector<std::string> messages;
    std::string json;
    std::string table;
};

namespace {

thread_local std::string g_last_error;

betaf_status status_of(betaf::ErrorKind kind) {
    switch (kind) {
        case betaf::ErrorKind::domain: return BETAF_ERR_DOMAIN;
        case betaf::ErrorKind::numeric: return BETAF_ERR_NUMERIC;
        case betaf::ErrorKind::nonexistence: return BETAF_ERR_NONEXISTENCE;
        case betaf::ErrorKind::parse: return BETAF_ERR_PARSE;
        case betaf::ErrorKind::schema: return BETAF_ERR_SCHEMA;
        case betaf::ErrorKind::io: return BETAF_ERR_IO;
        case betaf::ErrorKind::fit: return BETAF_ERR_FIT;
        case betaf::ErrorKind::metric: return BETAF_ERR_METRIC;
    }
    return BETAF_ERR_INTERNAL;
}

template <class F>
betaf_status guarded(F&& body) {
    try {
        body();
        g_last_error.clear();
        return BETAF_OK;
    } catch (const betaf::Error& e) {
        g_last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return BETAF_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return BETAF_ERR_INTERNAL;
    }
}

betaf_status null_arg(const char* what) {
    g_last_error = std::string(what) + " is NULL";
    return BETAF_ERR_NULL;
}

betaf::KernelFamily to_family(betaf_family f) {
    const int i = static_cast<int>(f);
    if (i < 0 || i >= BETAF_FAMILY_COUNT) throw betaf::DomainError("unknown family code " + std::to_string(i));
    return betaf::kAllFamilies[static_cast<std::size_t>(i)];
}

betaf_family from_family(betaf::KernelFamily f) {
    const auto it = std::find(betaf::kAllFamilies.begin(), betaf::kAllFamilies.end(), f);
    return static_cast<betaf_family>(it - betaf::kAllFamilies.begin());
}

betaf::OptimizerConfig to_config(const betaf_config& c, std::size_t n_params) {
    betaf::OptimizerConfig cfg;
    cfg.grad_tol = c.grad_tol;
    cfg.step_tol = c.step_tol;
    cfg.max_iter = c.max_iter;
    cfg.hessian_mode = c.hessian_mode == BETAF_HESSIAN_FINITE_DIFFERENCE ? betaf::HessianMode::finite_difference
                                                                         : betaf::HessianMode::bfgs_accumulated;
    cfg.coordinate_cap = c.coordinate_cap;
    cfg.quad_tol = c.quad_tol;
    if (c.n_starts > 0) {
        if (!c.starts) throw betaf::DomainError("starts is NULL but n_starts > 0");
        for (std::size_t i = 0; i < c.n_starts; ++i)
            cfg.starts.emplace_back(c.starts + i * n_params, c.starts + (i + 1) * n_params);
    }
    cfg.validate();
    return cfg;
}

void fill_summaries(betaf_report& r, const std::vector<betaf::KernelFamily>& order) {
    r.entries.clear();
    r.messages.clear();
    r.messages.reserve(order.size());
    for (betaf::KernelFamily fam : order) {
        betaf_fit_summary e{};
        e.family = from_family(fam);
        const auto res = std::find_if(r.results.begin(), r.results.end(), [&](const auto& x) { return x.family == fam; });
        if (res != r.results.end()) {
            const std::vector<double> p = res->params();
            e.ok = 1;
            e.converged = res->converged ? 1 : 0;
            e.cap_hit = res->cap_hit ? 1 : 0;
            e.iterations = res->iterations;
            e.start_index = res->start_index;
            e.n_params = p.size();
            std::copy(p.begin(), p.end(), e.params);
            e.loglik = res->loglik;
            e.grad_norm = res->grad_norm;
            e.sse = res->metrics.sse;
            e.sae = res->metrics.sae;
            e.chi_square = res->metrics.chi_square;
            e.has_est_mean = res->metrics.est_mean ? 1 : 0;
            e.est_mean = res->metrics.est_mean.value_or(NAN);
            r.messages.push_back(res->message);
        } else {
            const auto fail = std::find_if(r.failures.begin(), r.failures.end(), [&](const auto& x) { return x.family == fam; });
            e.n_params = 2 + betaf::kernel_arity(fam);
            e.loglik = NAN;
            e.est_mean = NAN;
            r.messages.push_back(fail != r.failures.end() ? fail->message : "");
        }
        e.message = r.messages.back().c_str();
        r.entries.push_back(e);
    }
}

}  // namespace

extern "C" {

const char* betaf_last_error(void) { return g_last_error.c_str(); }

const char* betaf_status_name(betaf_status status) {
    switch (status) {
        case BETAF_OK: return "ok";
        case BETAF_ERR_DOMAIN: return "domain error";
        case BETAF_ERR_NUMERIC: return "numeric error";
        case BETAF_ERR_NONEXISTENCE: return "moment does not exist";
        case BETAF_ERR_PARSE: return "parse error";
        case BETAF_ERR_SCHEMA: return "schema error";
        case BETAF_ERR_IO: return "I/O error";
        case BETAF_ERR_FIT: return "fit error";
        case BETAF_ERR_METRIC: return "metric error";
        case BETAF_ERR_NULL: return "null argument";
        case BETAF_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* betaf_family_name(betaf_family family) {
    const int i = static_cast<int>(family);
    if (i < 0 || i >= BETAF_FAMILY_COUNT) return "";
    return betaf::family_name(betaf::kAllFamilies[static_cast<std::size_t>(i)]).data();
}

betaf_status betaf_family_parse(const char* name, betaf_family* out) {
    if (!name) return null_arg("name");
    if (!out) return null_arg("out");
    return guarded([&] {
        const auto fam = betaf::parse_family(name);
        if (!fam) throw betaf::DomainError(std::string("unknown family '") + name + "'; expected one of gb1, gb2, bn, skewt, logf, be, bw");
        *out = from_family(*fam);
    });
}

size_t betaf_family_param_count(betaf_family family) {
    const int i = static_cast<int>(family);
    if (i < 0 || i >= BETAF_FAMILY_COUNT) return 0;
    return 2 + betaf::kernel_arity(betaf::kAllFamilies[static_cast<std::size_t>(i)]);
}

betaf_status betaf_dist_create(betaf_family family, const double* params, size_t n_params, betaf_dist** out) {
    if (!out) return null_arg("out");
    if (!params && n_params > 0) return null_arg("params");
    return guarded([&] {
        *out = new betaf_dist{betaf::BetaFDistribution::from_params(to_family(family), {params, n_params})};
    });
}

void betaf_dist_free(betaf_dist* d) { delete d; }

betaf_status betaf_dist_pdf(const betaf_dist* d, double x, double* out) {
    if (!d || !out) return null_arg(!d ? "d" : "out");
    return guarded([&] { *out = d->d.pdf(x); });
}

betaf_status betaf_dist_cdf(const betaf_dist* d, double x, double* out) {
    if (!d || !out) return null_arg(!d ? "d" : "out");
    return guarded([&] { *out = d->d.cdf(x); });
}

betaf_status betaf_dist_quantile(const betaf_dist* d, double p, double* out) {
    if (!d || !out) return null_arg(!d ? "d" : "out");
    return guarded([&] { *out = d->d.quantile(p); });
}

betaf_status betaf_dist_mean(const betaf_dist* d, double* out, int* exists) {
    if (!d || !out || !exists) return null_arg(!d ? "d" : "out");
    return guarded([&] {
        try {
            const auto m = d->d.mean_analytic();
            *out = m ? *m : d->d.moment_quadrature(1);
            *exists = 1;
        } catch (const betaf::NonexistenceError&) {
            *out = INFINITY;
            *exists = 0;
        }
    });
}

betaf_status betaf_dist_moment(const betaf_dist* d, int n, double rel_tol, double* out) {
    if (!d || !out) return null_arg(!d ? "d" : "out");
    return guarded([&] { *out = d->d.moment_quadrature(n, rel_tol); });
}

betaf_status betaf_dist_sample(const betaf_dist* d, size_t n, uint64_t seed, double* out) {
    if (!d || (!out && n > 0)) return null_arg(!d ? "d" : "out");
    return guarded([&] {
        const std::vector<double> x = d->d.sample(n, seed);
        std::copy(x.begin(), x.end(), out);
    });
}

betaf_status betaf_dist_write_density(const betaf_dist* d, double start, double stop, double step, const char* path) {
    if (!d || !path) return null_arg(!d ? "d" : "path");
    return guarded([&] { betaf::write_density_curve(d->d, {start, stop, step}, path); });
}

betaf_status betaf_sample_create(const double* edges, size_t n_edges, const uint64_t* counts,
                                 const double* group_means, double unit_scale, betaf_sample** out) {
    if (!out) return null_arg("out");
    if (!edges || !counts) return null_arg(!edges ? "edges" : "counts");
    return guarded([&] {
        if (n_edges < 3) throw betaf::SchemaError("grouped sample needs at least three edges");
        if (!(unit_scale > 0.0)) throw betaf::DomainError("unit_scale must be positive");
        betaf::GroupedSample s;
        s.unit_scale = unit_scale;
        for (std::size_t j = 0; j < n_edges; ++j) s.edges.push_back(edges[j] / unit_scale);
        s.counts.assign(counts, counts + n_edges - 1);
        if (group_means) {
            s.group_means.emplace();
            for (std::size_t i = 0; i + 1 < n_edges; ++i) s.group_means->push_back(group_means[i] / unit_scale);
        }
        s.validate_layout();
        *out = new betaf_sample{std::move(s)};
    });
}

betaf_status betaf_sample_read_csv(const char* path, double unit_scale, betaf_sample** out) {
    if (!path || !out) return null_arg(!path ? "path" : "out");
    return guarded([&] { *out = new betaf_sample{betaf::read_grouped_csv(path, unit_scale)}; });
}

betaf_status betaf_sample_parse_csv(const char* text, double unit_scale, betaf_sample** out) {
    if (!text || !out) return null_arg(!text ? "text" : "out");
    return guarded([&] { *out = new betaf_sample{betaf::parse_grouped_csv(text, unit_scale)}; });
}

betaf_status betaf_sample_simulate(const betaf_dist* d, size_t n, const double* edges, size_t n_edges, uint64_t seed,
                                   double unit_scale, betaf_sample** out) {
    if (!d || !edges || !out) return null_arg(!d ? "d" : (!edges ? "edges" : "out"));
    return guarded([&] {
        std::vector<double> e(edges, edges + n_edges);
        if (!e.empty() && std::isfinite(e.back())) e.push_back(INFINITY);
        *out = new betaf_sample{betaf::simulate_grouped(d->d, n, std::move(e), seed, unit_scale)};
    });
}

betaf_status betaf_sample_write_csv(const betaf_sample* s, const char* path) {
    if (!s || !path) return null_arg(!s ? "s" : "path");
    return guarded([&] { betaf::write_grouped_csv(s->s, path); });
}

void betaf_sample_free(betaf_sample* s) { delete s; }

size_t betaf_sample_cells(const betaf_sample* s) { return s ? s->s.cells() : 0; }

uint64_t betaf_sample_total(const betaf_sample* s) { return s ? s->s.total() : 0; }

betaf_status betaf_sample_loglik(const betaf_sample* s, const betaf_dist* d, double* out) {
    if (!s || !d || !out) return null_arg(!s ? "s" : (!d ? "d" : "out"));
    return guarded([&] { *out = betaf::log_likelihood(d->d, s->s).value; });
}

betaf_status betaf_sample_cell_probs(const betaf_sample* s, const betaf_dist* d, double* out) {
    if (!s || !d || !out) return null_arg(!s ? "s" : (!d ? "d" : "out"));
    return guarded([&] {
        const auto p = betaf::cell_probs(d->d, s->s);
        std::copy(p.probs.begin(), p.probs.end(), out);
    });
}

void betaf_config_default(betaf_config* cfg) {
    if (!cfg) return;
    const betaf::OptimizerConfig def;
    cfg->grad_tol = def.grad_tol;
    cfg->step_tol = def.step_tol;
    cfg->max_iter = def.max_iter;
    cfg->hessian_mode = BETAF_HESSIAN_BFGS;
    cfg->coordinate_cap = def.coordinate_cap;
    cfg->quad_tol = def.quad_tol;
    cfg->starts = nullptr;
    cfg->n_starts = 0;
}

betaf_status betaf_fit(const betaf_sample* s, const betaf_family* families, size_t n_families, const betaf_config* cfg,
                       betaf_report** out) {
    if (!s || !families || !out) return null_arg(!s ? "s" : (!families ? "families" : "out"));
    return guarded([&] {
        betaf_config c;
        betaf_config_default(&c);
        if (cfg) c = *cfg;
        if (n_families == 0) throw betaf::DomainError("no families requested");
        if (c.n_starts > 0 && n_families != 1) throw betaf::DomainError("user starts need exactly one family");
        s->s.validate();

        std::vector<betaf::KernelFamily> order;
        for (std::size_t i = 0; i < n_families; ++i) {
            const betaf::KernelFamily fam = to_family(families[i]);
            if (std::find(order.begin(), order.end(), fam) != order.end())
                throw betaf::DomainError("family '" + std::string(betaf::family_name(fam)) + "' requested twice");
            order.push_back(fam);
        }
        std::sort(order.begin(), order.end(), [](auto a, auto b) { return from_family(a) < from_family(b); });

        std::vector<betaf::OptimizerConfig> configs;
        for (betaf::KernelFamily fam : order) configs.push_back(to_config(c, 2 + betaf::kernel_arity(fam)));

        using Outcome = std::variant<betaf::FitResult, betaf::FitFailure>;
        const auto run = [&](std::size_t i) -> Outcome {
            try {
                return betaf::fit_family(order[i], s->s, configs[i]);
            } catch (const betaf::FitError& e) {
                return betaf::FitFailure{order[i], e.what()};
            }
        };
        std::vector<Outcome> outcomes;
        if (order.size() == 1) {
            outcomes.push_back(run(0));
        } else {
            std::vector<std::future<Outcome>> jobs;
            for (std::size_t i = 0; i < order.size(); ++i) jobs.push_back(std::async(std::launch::async, run, i));
            for (auto& j : jobs) outcomes.push_back(j.get());
        }

        auto report = std::make_unique<betaf_report>();
        report->sample = s->s;
        for (auto& o : outcomes) {
            if (auto* r = std::get_if<betaf::FitResult>(&o))
                report->results.push_back(std::move(*r));
            else
                report->failures.push_back(std::get<betaf::FitFailure>(std::move(o)));
        }
        fill_summaries(*report, order);
        report->json = betaf::report_json(report->results, report->sample, report->failures);
        if (!report->results.empty())
            report->table = betaf::comparison_table(report->results, report->sample).to_text();
        for (const auto& f : report->failures)
            report->table += std::string(betaf::family_label(f.family)) + ": fit failed: " + f.message + "\n";
        *out = report.release();
    });
}

void betaf_report_free(betaf_report* r) { delete r; }

size_t betaf_report_count(const betaf_report* r) { return r ? r->entries.size() : 0; }

int betaf_report_all_converged(const betaf_report* r) {
    if (!r || r->entries.empty()) return 0;
    return std::all_of(r->entries.begin(), r->entries.end(), [](const auto& e) { return e.ok && e.converged; }) ? 1 : 0;
}

betaf_status betaf_report_entry(const betaf_report* r, size_t i, betaf_fit_summary* out) {
    if (!r || !out) return null_arg(!r ? "r" : "out");
    if (i >= r->entries.size()) {
        g_last_error = "report entry " + std::to_string(i) + " out of range";
        return BETAF_ERR_DOMAIN;
    }
    *out = r->entries[i];
    return BETAF_OK;
}

const char* betaf_report_json(const betaf_report* r) { return r ? r->json.c_str() : ""; }

const char* betaf_report_table(const betaf_report* r) { return r ? r->table.c_str() : ""; }

betaf_status betaf_report_write_json(const betaf_report* r, const char* path) {
    if (!r || !path) return null_arg(!r ? "r" : "path");
    return guarded([&] { betaf::write_text(r->json, path); });
}

betaf_status betaf_report_write_table(const betaf_report* r, const char* path) {
    if (!r || !path) return null_arg(!r ? "r" : "path");
    return guarded([&] { betaf::write_text(r->table, path); });
}

}  // extern "C"
