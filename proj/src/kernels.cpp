#include "betaf/kernels.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "betaf/error.hpp"

namespace betaf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// Logistic pair (1/(1+e^-z), 1/(1+e^z)).
TailPair logistic_pair(double z) {
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return {1.0 / (1.0 + e), e / (1.0 + e)};
    }
    const double e = std::exp(z);
    return {e / (1.0 + e), 1.0 / (1.0 + e)};
}

// -log(1 - p) given p and q = 1 - p.
double neg_log_sf(double p, double q) { return p < 0.5 ? -std::log1p(-p) : -std::log(q); }

// Power-law density value at the origin: x^(k-1) with k the exponent.
double log_density_at_zero(double k, double log_coef) {
    if (k > 1.0) return -kInf;
    if (k < 1.0) return kInf;
    return log_coef;
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive and finite");
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
}

}  // namespace

std::string_view family_name(KernelFamily family) {
    switch (family) {
        case KernelFamily::gb1_power: return "gb1";
        case KernelFamily::gb2_burr: return "gb2";
        case KernelFamily::normal: return "bn";
        case KernelFamily::scaled_t2: return "skewt";
        case KernelFamily::logistic4: return "logf";
        case KernelFamily::exponential: return "be";
        case KernelFamily::weibull: return "bw";
    }
    return "unknown";
}

std::string_view family_label(KernelFamily family) {
    switch (family) {
        case KernelFamily::gb1_power: return "GB1";
        case KernelFamily::gb2_burr: return "GB2";
        case KernelFamily::normal: return "BN";
        case KernelFamily::scaled_t2: return "skew-t";
        case KernelFamily::logistic4: return "Log-F";
        case KernelFamily::exponential: return "BE";
        case KernelFamily::weibull: return "BW";
    }
    return "unknown";
}

std::optional<KernelFamily> parse_family(std::string_view name) {
    for (KernelFamily f : kAllFamilies)
        if (family_name(f) == name) return f;
    return std::nullopt;
}

std::size_t kernel_arity(KernelFamily family) {
    switch (family) {
        case KernelFamily::scaled_t2: return 0;
        case KernelFamily::exponential: return 1;
        default: return 2;
    }
}

Kernel::Kernel(KernelFamily family, ThetaF theta_f, BetaShapes shapes)
    : family_(family), theta_(std::move(theta_f)) {
    require_positive(shapes.alpha, "alpha");
    require_positive(shapes.beta, "beta");
    if (theta_.size() != kernel_arity(family))
        throw DomainError(std::string(family_name(family)) + " kernel expects " +
                          std::to_string(kernel_arity(family)) + " parameter(s), got " +
                          std::to_string(theta_.size()));
    switch (family) {
        case KernelFamily::gb1_power:
        case KernelFamily::gb2_burr:
            require_positive(theta_[0], "shape a");
            require_positive(theta_[1], "scale b");
            break;
        case KernelFamily::normal:
            require_finite(theta_[0], "location mu");
            require_positive(theta_[1], "scale sigma");
            break;
        case KernelFamily::scaled_t2:
            break;
        case KernelFamily::logistic4:
            require_finite(theta_[0], "location a");
            require_positive(theta_[1], "scale b");
            break;
        case KernelFamily::exponential:
            require_positive(theta_[0], "rate a");
            break;
        case KernelFamily::weibull:
            require_positive(theta_[0], "rate a");
            require_positive(theta_[1], "shape b");
            break;
    }
    if (family == KernelFamily::scaled_t2) {
        p0_ = shapes.alpha + shapes.beta;
    } else {
        p0_ = theta_[0];
        if (theta_.size() > 1) p1_ = theta_[1];
    }
}

Support Kernel::support() const {
    switch (family_) {
        case KernelFamily::gb1_power: return {0.0, p1_};
        case KernelFamily::gb2_burr:
        case KernelFamily::exponential:
        case KernelFamily::weibull: return {0.0, kInf};
        default: return {-kInf, kInf};
    }
}

TailPair Kernel::cdf_pair(double x) const {
    if (std::isnan(x)) throw DomainError("kernel cdf evaluated at NaN");
    switch (family_) {
        case KernelFamily::gb1_power: {
            if (x <= 0.0) return {0.0, 1.0};
            if (x >= p1_) return {1.0, 0.0};
            const double r = p0_ * std::log(x / p1_);
            return {std::exp(r), -std::expm1(r)};
        }
        case KernelFamily::gb2_burr: {
            if (x <= 0.0) return {0.0, 1.0};
            if (std::isinf(x)) return {1.0, 0.0};
            return logistic_pair(p0_ * std::log(x / p1_));
        }
        case KernelFamily::normal: {
            const double z = (x - p0_) / p1_;
            return {specfun::std_normal_cdf(z), specfun::std_normal_sf(z)};
        }
        case KernelFamily::scaled_t2: {
            if (std::isinf(x)) return x > 0 ? TailPair{1.0, 0.0} : TailPair{0.0, 1.0};
            const double ax = std::fabs(x);
            const double r = ax > 1e150 ? ax : std::sqrt(p0_ + x * x);
            const double small = 0.5 * p0_ / (r * (r + ax));
            const double large = 0.5 * (1.0 + ax / r);
            return x >= 0.0 ? TailPair{large, small} : TailPair{small, large};
        }
        case KernelFamily::logistic4: {
            if (std::isinf(x)) return x > 0 ? TailPair{1.0, 0.0} : TailPair{0.0, 1.0};
            return logistic_pair((x - p0_) / p1_);
        }
        case KernelFamily::exponential: {
            if (x <= 0.0) return {0.0, 1.0};
            const double r = -p0_ * x;
            return {-std::expm1(r), std::exp(r)};
        }
        case KernelFamily::weibull: {
            if (x <= 0.0) return {0.0, 1.0};
            const double w = p0_ * std::pow(x, p1_);
            return {-std::expm1(-w), std::exp(-w)};
        }
    }
    return {0.0, 1.0};
}

// ln Phi(z); the asymptotic series takes over where Phi underflows.
double log_normal_cdf(double z) {
    if (z > -30.0) return std::log(specfun::std_normal_cdf(z));
    const double r = 1.0 / (z * z);
    return specfun::std_normal_log_pdf(z) - std::log(-z) + std::log1p(r * (-1.0 + r * (3.0 - 15.0 * r)));
}

TailPair Kernel::log_cdf_pair(double x) const {
    if (std::isnan(x)) throw DomainError("kernel cdf evaluated at NaN");
    const Support s = support();
    if (x <= s.lower) return {-kInf, 0.0};
    if (x >= s.upper) return {0.0, -kInf};
    switch (family_) {
        case KernelFamily::gb1_power: {
            const double r = p0_ * std::log(x / p1_);
            return {r, std::log(-std::expm1(r))};
        }
        case KernelFamily::gb2_burr: {
            const double lz = p0_ * std::log(x / p1_);
            return {-softplus(-lz), -softplus(lz)};
        }
        case KernelFamily::normal: {
            const double z = (x - p0_) / p1_;
            return {log_normal_cdf(z), log_normal_cdf(-z)};
        }
        case KernelFamily::scaled_t2: {
            const double ax = std::fabs(x);
            const double log_r = ax > 1.0 ? std::log(ax) + 0.5 * std::log1p(p0_ / (ax * ax)) : 0.5 * std::log(p0_ + x * x);
            const double r = std::exp(log_r);
            const double log_small = std::log(0.5 * p0_) - log_r - std::log(r + ax);
            const double log_large = std::log(0.5 * (1.0 + ax / r));
            return x >= 0.0 ? TailPair{log_large, log_small} : TailPair{log_small, log_large};
        }
        case KernelFamily::logistic4: {
            const double z = (x - p0_) / p1_;
            return {-softplus(-z), -softplus(z)};
        }
        case KernelFamily::exponential: return {std::log(-std::expm1(-p0_ * x)), -p0_ * x};
        case KernelFamily::weibull: {
            const double w = p0_ * std::pow(x, p1_);
            return {std::log(-std::expm1(-w)), -w};
        }
    }
    return {-kInf, 0.0};
}

double Kernel::log_pdf(double x) const {
    switch (family_) {
        case KernelFamily::gb1_power:
            if (x < 0.0 || x > p1_) return -kInf;
            if (x == 0.0) return log_density_at_zero(p0_, std::log(p0_ / p1_));
            return std::log(p0_) + (p0_ - 1.0) * std::log(x) - p0_ * std::log(p1_);
        case KernelFamily::gb2_burr: {
            if (x < 0.0 || std::isinf(x)) return -kInf;
            if (x == 0.0) return log_density_at_zero(p0_, std::log(p0_ / p1_));
            const double lz = p0_ * std::log(x / p1_);
            return std::log(p0_) - std::log(x) + lz - 2.0 * softplus(lz);
        }
        case KernelFamily::normal: {
            const double z = (x - p0_) / p1_;
            return specfun::std_normal_log_pdf(z) - std::log(p1_);
        }
        case KernelFamily::scaled_t2: {
            if (std::isinf(x)) return -kInf;
            const double ax = std::fabs(x);
            const double log_r2 = ax > 1.0 ? 2.0 * std::log(ax) + std::log1p(p0_ / (ax * ax)) : std::log(p0_ + x * x);
            return std::log(0.5 * p0_) - 1.5 * log_r2;
        }
        case KernelFamily::logistic4: {
            if (std::isinf(x)) return -kInf;
            const double z = (x - p0_) / p1_;
            return -std::log(p1_) - softplus(z) - softplus(-z);
        }
        case KernelFamily::exponential:
            if (x < 0.0 || std::isinf(x)) return -kInf;
            return std::log(p0_) - p0_ * x;
        case KernelFamily::weibull: {
            if (x < 0.0 || std::isinf(x)) return -kInf;
            if (x == 0.0) return log_density_at_zero(p1_, std::log(p0_ * p1_));
            return std::log(p0_) + std::log(p1_) + (p1_ - 1.0) * std::log(x) - p0_ * std::pow(x, p1_);
        }
    }
    return -kInf;
}

double Kernel::pdf(double x) const { return std::exp(log_pdf(x)); }

double Kernel::quantile(double p, double q) const {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("kernel quantile requires p in [0, 1]");
    const Support s = support();
    if (p == 0.0) {
        if (std::isinf(s.lower)) throw DomainError("quantile at p = 0 is -infinity for this kernel");
        return s.lower;
    }
    if (q <= 0.0) {
        if (std::isinf(s.upper)) throw DomainError("quantile at p = 1 is +infinity for this kernel");
        return s.upper;
    }
    const double logit = std::log(p) - std::log(q);
    switch (family_) {
        case KernelFamily::gb1_power: {
            const double log_p = p < 0.5 ? std::log(p) : std::log1p(-q);
            return p1_ * std::exp(log_p / p0_);
        }
        case KernelFamily::gb2_burr: return p1_ * std::exp(logit / p0_);
        case KernelFamily::normal:
            return p <= q ? p0_ + p1_ * specfun::std_normal_quantile(p) : p0_ - p1_ * specfun::std_normal_quantile(q);
        case KernelFamily::scaled_t2: return (p - q) * std::sqrt(p0_) / (2.0 * std::sqrt(p * q));
        case KernelFamily::logistic4: return p0_ + p1_ * logit;
        case KernelFamily::exponential: return neg_log_sf(p, q) / p0_;
        case KernelFamily::weibull: return std::pow(neg_log_sf(p, q) / p0_, 1.0 / p1_);
    }
    return 0.0;
}

std::vector<double> Kernel::cdf_grad(double x) const {
    const TailPair c = cdf_pair(x);
    // Outside the support interior F is locally constant in theta_F.
    if (c.lower == 0.0 || c.upper == 0.0) return std::vector<double>(theta_.size(), 0.0);
    switch (family_) {
        case KernelFamily::gb1_power: {
            const double lr = std::log(x / p1_);
            return {c.lower * lr, -p0_ * c.lower / p1_};
        }
        case KernelFamily::gb2_burr: {
            const double fs = c.lower * c.upper;
            return {fs * std::log(x / p1_), -fs * p0_ / p1_};
        }
        case KernelFamily::normal: {
            const double z = (x - p0_) / p1_;
            const double phi = std::exp(specfun::std_normal_log_pdf(z)) / p1_;
            return {-phi, -phi * z};
        }
        case KernelFamily::scaled_t2: return {};
        case KernelFamily::logistic4: {
            const double z = (x - p0_) / p1_;
            const double f = c.lower * c.upper / p1_;
            return {-f, -f * z};
        }
        case KernelFamily::exponential: return {x * c.upper};
        case KernelFamily::weibull: {
            const double xb = std::pow(x, p1_);
            return {xb * c.upper, p0_ * xb * std::log(x) * c.upper};
        }
    }
    return {};
}

double kernel_cdf(KernelFamily family, const ThetaF& theta_f, BetaShapes theta_g, double x) {
    return Kernel(family, theta_f, theta_g).cdf(x);
}

double kernel_pdf(KernelFamily family, const ThetaF& theta_f, BetaShapes theta_g, double x) {
    return Kernel(family, theta_f, theta_g).pdf(x);
}

double kernel_quantile(KernelFamily family, const ThetaF& theta_f, BetaShapes theta_g, double p) {
    return Kernel(family, theta_f, theta_g).quantile(p);
}

std::vector<double> kernel_cdf_grad(KernelFamily family, const ThetaF& theta_f, BetaShapes theta_g, double x) {
    return Kernel(family, theta_f, theta_g).cdf_grad(x);
}

}  // namespace betaf
