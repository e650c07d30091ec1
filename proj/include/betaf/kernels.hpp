#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "betaf/specfun.hpp"

namespace betaf {

using specfun::TailPair;

// Kernel CDFs F that can be composed with the beta distribution.
enum class KernelFamily {
    gb1_power,    // (x/b)^a on [0, b]                       -> GB1
    gb2_burr,     // 1 - 1/(1 + (x/b)^a) on [0, inf)          -> GB2
    normal,       // Phi((x - mu)/sigma)                       -> beta-normal
    scaled_t2,    // t on 2 df scaled by sqrt((alpha+beta)/2) -> skew-t
    logistic4,    // logistic((x - a)/b)                       -> log-F
    exponential,  // 1 - exp(-a x)                             -> beta-exponential
    weibull,      // 1 - exp(-a x^b)                           -> beta-Weibull
};

inline constexpr std::array<KernelFamily, 7> kAllFamilies = {
    KernelFamily::gb1_power, KernelFamily::gb2_burr,    KernelFamily::normal,  KernelFamily::scaled_t2,
    KernelFamily::logistic4, KernelFamily::exponential, KernelFamily::weibull};

// Short CLI name: gb1, gb2, bn, skewt, logf, be, bw.
std::string_view family_name(KernelFamily family);
// Name of the composed model as printed in tables: GB1, GB2, BN, skew-t, ...
std::string_view family_label(KernelFamily family);
std::optional<KernelFamily> parse_family(std::string_view name);

// Number of kernel parameters (theta_F). The scaled t has none: its
// constants are the beta shapes.
std::size_t kernel_arity(KernelFamily family);

struct BetaShapes {
    double alpha = 1.0;
    double beta = 1.0;
};

struct ThetaF {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

struct Support {
    double lower;
    double upper;
};

// A validated kernel F(.; theta_F). Immutable value type.
class Kernel {
public:
    // Throws DomainError on bad arity or non-positive scale/rate/shape.
    Kernel(KernelFamily family, ThetaF theta_f, BetaShapes shapes);

    KernelFamily family() const { return family_; }
    const ThetaF& theta_f() const { return theta_; }
    Support support() const;

    // F(x) and 1 - F(x); below the support (0, 1), above it (1, 0).
    TailPair cdf_pair(double x) const;
    double cdf(double x) const { return cdf_pair(x).lower; }
    // (ln F(x), ln(1 - F(x))) without underflow in the tails.
    TailPair log_cdf_pair(double x) const;
    double log_pdf(double x) const;
    double pdf(double x) const;
    // F^{-1} given p and q = 1 - p.
    double quantile(double p, double q) const;
    double quantile(double p) const { return quantile(p, 1.0 - p); }
    // dF(x)/d theta_F, one entry per kernel parameter.
    std::vector<double> cdf_grad(double x) const;

private:
    KernelFamily family_;
    ThetaF theta_;
    double p0_ = 0.0;
    double p1_ = 0.0;
};

double kernel_cdf(KernelFamily family, const ThetaF& theta_f, BetaShapes theta_g, double x);
double kernel_pdf(KernelFamily family, const ThetaF& theta_f, BetaShapes theta_g, double x);
double kernel_quantile(KernelFamily family, const ThetaF& theta_f, BetaShapes theta_g, double p);
std::vector<double> kernel_cdf_grad(KernelFamily family, const ThetaF& theta_f, BetaShapes theta_g, double x);

}  // namespace betaf
