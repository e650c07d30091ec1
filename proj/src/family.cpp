#include "betaf/family.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "betaf/error.hpp"
#include "betaf/quadrature.hpp"

namespace betaf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Break points (as probabilities) that partition the support for quadrature.
constexpr std::array<double, 11> kBreaks = {1e-4, 1e-3, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999, 0.9999};

void check_moment_exists(const BetaFDistribution& d, int n) {
    const BetaShapes s = d.shapes();
    const double order = n;
    switch (d.family()) {
        case KernelFamily::gb2_burr: {
            const double a = d.theta_f()[0];
            if (!(s.beta * a > order))
                throw NonexistenceError("GB2 moment of order " + std::to_string(n) +
                                        " requires beta > n/a (beta = " + std::to_string(s.beta) +
                                        ", n/a = " + std::to_string(order / a) + ")");
            break;
        }
        case KernelFamily::scaled_t2:
            if (!(2.0 * s.alpha > order && 2.0 * s.beta > order))
                throw NonexistenceError("skew-t moment of order " + std::to_string(n) +
                                        " requires alpha > n/2 and beta > n/2");
            break;
        default:
            break;
    }
}

}  // namespace

BetaFDistribution::BetaFDistribution(BetaShapes shapes, KernelFamily family, ThetaF theta_f)
    : shapes_(shapes), kernel_(family, std::move(theta_f), shapes), log_beta_(specfun::log_beta(shapes.alpha, shapes.beta)) {}

BetaFDistribution BetaFDistribution::from_params(KernelFamily family, std::span<const double> params) {
    const std::size_t want = 2 + kernel_arity(family);
    if (params.size() != want)
        throw DomainError(std::string(family_name(family)) + " expects " + std::to_string(want) +
                          " parameters (alpha, beta, theta_F...), got " + std::to_string(params.size()));
    ThetaF theta{std::vector<double>(params.begin() + 2, params.end())};
    return BetaFDistribution({params[0], params[1]}, family, std::move(theta));
}

std::vector<double> BetaFDistribution::params() const {
    std::vector<double> out = {shapes_.alpha, shapes_.beta};
    out.insert(out.end(), theta_f().values.begin(), theta_f().values.end());
    return out;
}

double BetaFDistribution::log_pdf(double x) const {
    const double lf = kernel_.log_pdf(x);
    if (lf == -kInf) return -kInf;
    const TailPair c = kernel_.log_cdf_pair(x);
    double lp = lf - log_beta_;
    if (shapes_.alpha != 1.0) lp += (shapes_.alpha - 1.0) * c.lower;
    if (shapes_.beta != 1.0) lp += (shapes_.beta - 1.0) * c.upper;
    return lp;
}

double BetaFDistribution::pdf(double x) const {
    const double lp = log_pdf(x);
    return std::isnan(lp) ? 0.0 : std::exp(lp);
}

TailPair BetaFDistribution::cdf_pair(double x) const {
    const TailPair c = kernel_.cdf_pair(x);
    return specfun::reg_inc_beta_pair(c.lower, c.upper, shapes_.alpha, shapes_.beta);
}

double BetaFDistribution::quantile(double p, double q) const {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile requires p in [0, 1]");
    const TailPair y = specfun::reg_inc_beta_inv_pair(p, q, shapes_.alpha, shapes_.beta);
    return kernel_.quantile(y.lower, y.upper);
}

TailPair uniform_pair(std::uint64_t bits) {
    constexpr double kScale = 1.0 / 4503599627370496.0;  // 2^-52
    const double k = static_cast<double>(bits >> 12);
    return {(k + 0.5) * kScale, (4503599627370496.0 - k - 0.5) * kScale};
}

std::vector<double> BetaFDistribution::sample(std::size_t n, std::uint64_t seed) const {
    std::mt19937_64 engine(seed);
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const TailPair u = uniform_pair(engine());
        out.push_back(quantile(u.lower, u.upper));
    }
    return out;
}

std::optional<double> BetaFDistribution::mean_analytic() const {
    using specfun::log_beta;
    using specfun::log_gamma;
    const double al = shapes_.alpha;
    const double be = shapes_.beta;
    switch (family()) {
        case KernelFamily::gb1_power: {
            const double a = theta_f()[0];
            const double b = theta_f()[1];
            return b * std::exp(log_beta(al + be, 1.0 / a) - log_beta(al, 1.0 / a));
        }
        case KernelFamily::gb2_burr: {
            const double a = theta_f()[0];
            const double b = theta_f()[1];
            check_moment_exists(*this, 1);
            return b * std::exp(log_beta(al + 1.0 / a, be - 1.0 / a) - log_beta_);
        }
        case KernelFamily::scaled_t2: {
            check_moment_exists(*this, 1);
            const double ratio = std::exp(log_gamma(al - 0.5) + log_gamma(be - 0.5) - log_gamma(al) - log_gamma(be));
            return 0.5 * (al - be) * std::sqrt(al + be) * ratio;
        }
        case KernelFamily::exponential:
            return (specfun::digamma(al + be) - specfun::digamma(be)) / theta_f()[0];
        case KernelFamily::weibull:
            return beta_weibull_series_moment(al, be, theta_f()[0], theta_f()[1], 1);
        case KernelFamily::normal:
        case KernelFamily::logistic4:
            return std::nullopt;
    }
    return std::nullopt;
}

double BetaFDistribution::moment_quadrature(int n, double rel_tol) const {
    if (n < 1) throw DomainError("moment order must be a positive integer");
    check_moment_exists(*this, n);

    // E[X^n] = int_0^1 Q_F(t)^n g(t) dt with g the beta density; the beta
    // quantiles split [0, 1] so each piece sees at most one endpoint
    // singularity, which tanh-sinh absorbs.
    const double al = shapes_.alpha;
    const double be = shapes_.beta;
    std::array<double, kBreaks.size() + 2> lo{};
    std::array<double, kBreaks.size() + 2> hi{};
    lo.front() = 0.0;
    hi.front() = 1.0;
    lo.back() = 1.0;
    hi.back() = 0.0;
    for (std::size_t i = 0; i < kBreaks.size(); ++i) {
        lo[i + 1] = specfun::reg_inc_beta_inv(kBreaks[i], al, be);
        hi[i + 1] = specfun::reg_inc_beta_inv(1.0 - kBreaks[i], be, al);
    }

    const auto weight = [&](double p, double q) {
        if (!(p > 0.0) || !(q > 0.0)) return 0.0;
        const double x = kernel_.quantile(p, q);
        if (x == 0.0) return 0.0;
        const double v = std::exp(n * std::log(std::fabs(x)) + (al - 1.0) * std::log(p) + (be - 1.0) * std::log(q) -
                                  log_beta_);
        return (x < 0.0 && n % 2 == 1) ? -v : v;
    };

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < lo.size(); ++i) {
        quad::Result r;
        if (lo[i] + lo[i + 1] < 1.0) {
            // Integrate over p; q is kept exact from the right end.
            if (!(lo[i + 1] > lo[i])) continue;
            r = quad::tanh_sinh([&](double p, double, double from_right) { return weight(p, hi[i + 1] + from_right); },
                                lo[i], lo[i + 1], rel_tol);
        } else {
            // Integrate over q = 1 - t so the upper tail keeps its resolution.
            if (!(hi[i] > hi[i + 1])) continue;
            r = quad::tanh_sinh([&](double q, double, double from_right) { return weight(lo[i] + from_right, q); },
                                hi[i + 1], hi[i], rel_tol);
        }
        if (!r.converged || !std::isfinite(r.value))
            throw NonexistenceError("moment quadrature of order " + std::to_string(n) +
                                    " did not converge; the moment may not exist");
        total += r.value;
    }
    return total;
}

double beta_weibull_series_moment(double alpha, double beta, double rate, double shape, int n, int max_terms) {
    using specfun::log_gamma;
    if (!(alpha > 0 && beta > 0 && rate > 0 && shape > 0)) throw DomainError("beta-Weibull parameters must be positive");
    const double s = static_cast<double>(n) / shape;
    const double power = -(s + 1.0);
    const double log_pref = log_gamma(alpha + beta) + log_gamma(s + 1.0) - log_gamma(beta) - s * std::log(rate);

    // c_k = (-1)^k / (k! Gamma(alpha - k)); the recursion passes through the
    // poles of Gamma as exact zeros.
    double c = specfun::reciprocal_gamma(alpha);
    double sum = 0.0;
    bool exhausted = false;
    int k = 0;
    for (; k < max_terms; ++k) {
        const double term = c * std::pow(beta + k, power);
        sum += term;
        c *= -(alpha - 1.0 - k) / (k + 1.0);
        if (c == 0.0) {
            exhausted = true;
            break;
        }
        if (k > alpha && std::fabs(term) < 1e-12 * std::fabs(sum)) {
            exhausted = true;
            break;
        }
    }

    if (!exhausted) {
        // For k > alpha - 1 the terms share one sign and equal h(k) with
        // h(x) = sin(pi alpha)/pi * Gamma(x+1-alpha)/Gamma(x+1) * (beta+x)^-(s+1).
        // Tail sum ~ integral of h from K - 1/2 plus the midpoint correction.
        const double sin_pa = std::sin(std::numbers::pi * (alpha - std::floor(alpha))) *
                              (std::fmod(std::floor(alpha), 2.0) == 0.0 ? 1.0 : -1.0);
        const double amp = sin_pa / std::numbers::pi;
        const double log_ga = log_gamma(alpha);
        const auto log_h = [&](double x) {
            return specfun::log_beta(x + 1.0 - alpha, alpha) - log_ga + power * std::log(beta + x);
        };
        const auto h = [&](double x) { return amp * std::exp(log_h(x)); };
        const double x0 = max_terms - 0.5;
        const auto mapped = [&](double v, double, double) {
            if (v <= 0.0) return 0.0;
            const double x = x0 / v;
            return amp * std::exp(log_h(x) + std::log(x0) - 2.0 * std::log(v));
        };
        const quad::Result tail = quad::tanh_sinh(mapped, 0.0, 1.0, 1e-12);
        const double p = alpha + s + 1.0;
        sum += tail.value - p * h(x0) / (24.0 * x0);
    }
    return std::exp(log_pref) * sum;
}

}  // namespace betaf
