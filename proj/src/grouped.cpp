#include "betaf/grouped.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "betaf/error.hpp"
#include "betaf/quadrature.hpp"

namespace betaf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Kernel CDF at every edge under the boundary convention.
std::vector<TailPair> edge_kernel_cdf(const Kernel& k, const GroupedSample& s) {
    const std::size_t r = s.cells();
    std::vector<TailPair> out(r + 1);
    out[0] = {0.0, 1.0};
    out[r] = {1.0, 0.0};
    for (std::size_t j = 1; j < r; ++j) out[j] = k.cdf_pair(s.edges[j]);
    return out;
}

std::vector<double> probs_from_edges(const BetaFDistribution& d, const std::vector<TailPair>& f) {
    const BetaShapes sh = d.shapes();
    std::vector<TailPair> g(f.size());
    for (std::size_t j = 0; j < f.size(); ++j)
        g[j] = specfun::reg_inc_beta_pair(f[j].lower, f[j].upper, sh.alpha, sh.beta);
    std::vector<double> p(f.size() - 1);
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        // Difference the tail that is smaller to avoid cancellation.
        const double v = g[i].lower > 0.5 ? g[i].upper - g[i + 1].upper : g[i + 1].lower - g[i].lower;
        p[i] = std::max(v, 0.0);
    }
    return p;
}

void check_model_matches(const GroupedSample& s) {
    if (s.edges.size() < 3 || s.counts.size() + 1 != s.edges.size())
        throw SchemaError("grouped sample needs at least two cells and edges = cells + 1");
}

// Step for finite differences in coordinate k of (alpha, beta, theta_F...).
double fd_step(KernelFamily fam, std::span<const double> params, std::size_t k) {
    const bool location = k == 2 && (fam == KernelFamily::normal || fam == KernelFamily::logistic4);
    const double scale = location ? std::max(std::fabs(params[2]), params[3]) : std::fabs(params[k]);
    return 1e-3 * scale;
}

double loglik_at(KernelFamily fam, std::span<const double> params, const GroupedSample& s) {
    try {
        return log_likelihood(BetaFDistribution::from_params(fam, params), s).value;
    } catch (const DomainError&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}


struct ShapePiece {
    double near = 0.0;
    double far = 0.0;
    bool ok = true;
};

// Over s in [s_lo, s_hi] (s = t or 1 - t, whichever is <= 1/2), integrates
// the beta density s^(p-1) (1-s)^(q-1) / B times (ln s - c_near) and
// (ln(1-s) - c_far). For p < 1 the variable becomes w = s^p, which removes
// the power singularity at s = 0 and leaves only a log.
ShapePiece shape_piece(double s_lo, double s_hi, double p, double q, double lb, double c_near, double c_far,
                       double tol) {
    ShapePiece out;
    if (!(s_hi > s_lo)) return out;
    const bool substitute = p < 1.0;
    const auto weight_and_s = [&](double x, double& s, double& log_s) {
        if (substitute) {
            log_s = std::log(x) / p;
            s = std::exp(log_s);
            return std::exp(-lb + (q - 1.0) * std::log1p(-s)) / p;
        }
        s = x;
        log_s = std::log(x);
        return std::exp(-lb + (p - 1.0) * log_s + (q - 1.0) * std::log1p(-s));
    };
    const auto near = [&](double x, double, double) {
        double s = 0.0, log_s = 0.0;
        const double w = weight_and_s(x, s, log_s);
        return w * (log_s - c_near);
    };
    const auto far = [&](double x, double, double) {
        double s = 0.0, log_s = 0.0;
        const double w = weight_and_s(x, s, log_s);
        return w * (std::log1p(-s) - c_far);
    };
    const double a = substitute ? std::pow(s_lo, p) : s_lo;
    const double b = substitute ? std::pow(s_hi, p) : s_hi;
    const quad::Result rn = quad::tanh_sinh(near, a, b, tol);
    const quad::Result rf = quad::tanh_sinh(far, a, b, tol);
    out.near = rn.value;
    out.far = rf.value;
    out.ok = rn.converged && rf.converged;
    return out;
}

}  // namespace

std::uint64_t GroupedSample::total() const {
    std::uint64_t n = 0;
    for (std::uint64_t c : counts) n += c;
    return n;
}

std::size_t GroupedSample::occupied_cells() const {
    return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](std::uint64_t c) { return c > 0; }));
}

double GroupedSample::largest_finite_edge() const {
    double m = -kInf;
    for (double e : edges)
        if (std::isfinite(e)) m = std::max(m, e);
    return m;
}

void GroupedSample::validate_layout() const {
    if (!(unit_scale > 0.0) || !std::isfinite(unit_scale)) throw DomainError("unit_scale must be positive");
    if (edges.size() < 3) throw SchemaError("grouped sample needs at least two cells");
    if (counts.size() + 1 != edges.size())
        throw SchemaError("expected " + std::to_string(edges.size() - 1) + " counts, got " + std::to_string(counts.size()));
    for (std::size_t j = 0; j < edges.size(); ++j) {
        const double e = edges[j];
        if (std::isnan(e)) throw SchemaError("edge " + std::to_string(j) + " is NaN");
        if (e == -kInf && j != 0) throw SchemaError("only the first edge may be -inf");
        if (e == kInf && j + 1 != edges.size()) throw SchemaError("only the last edge may be +inf");
        if (j > 0 && !(e > edges[j - 1]))
            throw SchemaError("edges must be strictly increasing (edge " + std::to_string(j) + ")");
    }
    if (group_means) {
        const auto& m = *group_means;
        if (m.size() != counts.size())
            throw SchemaError("expected " + std::to_string(counts.size()) + " group means, got " + std::to_string(m.size()));
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (!std::isfinite(m[i])) throw SchemaError("group mean " + std::to_string(i) + " is not finite");
            // The extreme bins stand for the support ends, so only their inner
            // side is checked.
            const bool first = i == 0;
            const bool last = i + 1 == m.size();
            if ((!first && m[i] < edges[i]) || (!last && m[i] > edges[i + 1]))
                throw SchemaError("group mean of cell " + std::to_string(i) + " lies outside its bin");
        }
    }
}

void GroupedSample::validate() const {
    validate_layout();
    if (total() == 0) throw SchemaError("grouped sample has no observations");
}

CellProbabilities cell_probs(const BetaFDistribution& d, const GroupedSample& s) {
    check_model_matches(s);
    return {probs_from_edges(d, edge_kernel_cdf(d.kernel(), s))};
}

LogLikelihood log_likelihood(const BetaFDistribution& d, const GroupedSample& s) {
    const CellProbabilities p = cell_probs(d, s);
    LogLikelihood out;
    for (std::size_t i = 0; i < s.cells(); ++i) {
        if (s.counts[i] == 0) continue;
        if (!(p.probs[i] > kProbabilityFloor)) {
            out.value = -kInf;
            out.underflow_cell = i;
            return out;
        }
        out.value += static_cast<double>(s.counts[i]) * std::log(std::max(p.probs[i], kProbabilityFloor));
    }
    return out;
}

std::vector<double> log_likelihood_grad_fd(const BetaFDistribution& d, const GroupedSample& s,
                                           std::span<const std::size_t> coords) {
    const std::vector<double> base = d.params();
    std::vector<std::size_t> which(coords.begin(), coords.end());
    if (which.empty())
        for (std::size_t k = 0; k < base.size(); ++k) which.push_back(k);
    std::vector<double> grad(base.size(), 0.0);
    for (std::size_t k : which) {
        const double h = fd_step(d.family(), base, k);
        const auto central = [&](double step) {
            std::vector<double> up = base;
            std::vector<double> dn = base;
            up[k] += step;
            dn[k] -= step;
            return (loglik_at(d.family(), up, s) - loglik_at(d.family(), dn, s)) / (2.0 * step);
        };
        const double coarse = central(h);
        const double fine = central(0.5 * h);
        double g = (4.0 * fine - coarse) / 3.0;
        if (!std::isfinite(g)) g = central(0.05 * h);
        grad[k] = g;
    }
    return grad;
}

std::vector<double> log_likelihood_grad(const BetaFDistribution& d, const GroupedSample& s, const GradientOptions& opt) {
    check_model_matches(s);
    const std::size_t r = s.cells();
    const std::vector<TailPair> f = edge_kernel_cdf(d.kernel(), s);
    const std::vector<double> p = probs_from_edges(d, f);
    for (std::size_t i = 0; i < r; ++i)
        if (s.counts[i] > 0 && !(p[i] > kProbabilityFloor))
            throw NumericError("gradient undefined: occupied cell " + std::to_string(i) + " has zero probability",
                               p[i]);

    if (d.family() == KernelFamily::scaled_t2) return log_likelihood_grad_fd(d, s);

    const BetaShapes sh = d.shapes();
    const std::size_t arity = kernel_arity(d.family());
    std::vector<double> grad(2 + arity, 0.0);
    std::vector<double> ratio(r);
    for (std::size_t i = 0; i < r; ++i) ratio[i] = s.counts[i] > 0 ? static_cast<double>(s.counts[i]) / p[i] : 0.0;

    // Kernel block: each interior edge moves probability between its two cells.
    for (std::size_t j = 1; j < r; ++j) {
        if (f[j].lower <= 0.0 || f[j].upper <= 0.0) continue;
        const double w = ratio[j - 1] - ratio[j];
        if (w == 0.0) continue;
        const double g = std::exp(specfun::beta_log_pdf(f[j].lower, f[j].upper, sh.alpha, sh.beta));
        const std::vector<double> df = d.kernel().cdf_grad(s.edges[j]);
        for (std::size_t k = 0; k < arity; ++k) grad[2 + k] += g * w * df[k];
    }

    // Shape block: integrate dg/dalpha and dg/dbeta over each occupied cell.
    const double lb = specfun::log_beta(sh.alpha, sh.beta);
    const double psi_ab = specfun::digamma(sh.alpha + sh.beta);
    const double c_alpha = specfun::digamma(sh.alpha) - psi_ab;
    const double c_beta = specfun::digamma(sh.beta) - psi_ab;
    bool quad_ok = true;
    for (std::size_t i = 0; i < r && quad_ok; ++i) {
        if (s.counts[i] == 0) continue;
        const TailPair lo = f[i];
        const TailPair hi = f[i + 1];
        double da = 0.0;
        double db = 0.0;
        // Half below t = 1/2, measured from 0; near exponent alpha.
        if (lo.lower < 0.5) {
            const ShapePiece p = shape_piece(lo.lower, std::min(hi.lower, 0.5), sh.alpha, sh.beta, lb, c_alpha,
                                             c_beta, opt.quad_tol);
            quad_ok = quad_ok && p.ok;
            da += p.near;
            db += p.far;
        }
        // Half above t = 1/2, measured from 1; near exponent beta.
        if (hi.lower > 0.5) {
            const ShapePiece p = shape_piece(hi.upper, std::min(lo.upper, 0.5), sh.beta, sh.alpha, lb, c_beta,
                                             c_alpha, opt.quad_tol);
            quad_ok = quad_ok && p.ok;
            db += p.near;
            da += p.far;
        }
        grad[0] += ratio[i] * da;
        grad[1] += ratio[i] * db;
    }
    if (!quad_ok) {
        const std::size_t shape_coords[] = {0, 1};
        const std::vector<double> fd = log_likelihood_grad_fd(d, s, shape_coords);
        grad[0] = fd[0];
        grad[1] = fd[1];
    }
    return grad;
}

double empirical_mean(const GroupedSample& s) {
    if (!s.group_means) throw DomainError("empirical mean needs group means");
    const std::uint64_t n = s.total();
    if (n == 0) throw DomainError("empirical mean of an empty sample");
    double acc = 0.0;
    for (std::size_t i = 0; i < s.cells(); ++i) acc += static_cast<double>(s.counts[i]) * (*s.group_means)[i];
    return acc / static_cast<double>(n);
}

GroupedSample simulate_grouped(const BetaFDistribution& d, std::size_t n, std::vector<double> edges, std::uint64_t seed,
                               double unit_scale) {
    GroupedSample out;
    out.edges = std::move(edges);
    out.unit_scale = unit_scale;
    if (out.edges.size() < 3) throw SchemaError("simulation needs at least three edges");
    out.counts.assign(out.edges.size() - 1, 0);
    std::vector<double> sums(out.counts.size(), 0.0);
    const std::vector<double> draws = d.sample(n, seed);
    const auto inner_begin = out.edges.begin() + 1;
    const auto inner_end = out.edges.end() - 1;
    for (double x : draws) {
        const auto cell = static_cast<std::size_t>(std::upper_bound(inner_begin, inner_end, x) - inner_begin);
        ++out.counts[cell];
        sums[cell] += x;
    }
    std::vector<double> means(out.counts.size());
    for (std::size_t i = 0; i < means.size(); ++i) {
        const double lo = out.edges[i];
        const double hi = out.edges[i + 1];
        if (out.counts[i] > 0) {
            means[i] = sums[i] / static_cast<double>(out.counts[i]);
            // Rounding in the running sum must not push a mean out of its bin.
            if (i > 0) means[i] = std::max(means[i], lo);
            if (i + 1 < means.size()) means[i] = std::min(means[i], hi);
        }
        else if (std::isinf(hi))
            means[i] = lo;
        else if (std::isinf(lo))
            means[i] = hi;
        else
            means[i] = 0.5 * (lo + hi);
    }
    out.group_means = std::move(means);
    out.validate_layout();
    return out;
}

}  // namespace betaf
