#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "betaf/grouped.hpp"
#include "doctest.h"

namespace doctest {
template <>
struct StringMaker<std::vector<double>> {
    static String convert(const std::vector<double>& v) {
        std::ostringstream os;
        os.precision(17);
        os << '{';
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
        os << '}';
        return os.str().c_str();
    }
};
}  // namespace doctest

namespace support {

inline bool close_rel(double got, double want, double rel, double abs_floor = 0.0) {
    return std::fabs(got - want) <= std::max(rel * std::fabs(want), abs_floor);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

// Random parameters (alpha, beta, theta_F...) in a moderate region of each family.
inline std::vector<double> random_params(betaf::KernelFamily fam, std::mt19937_64& rng) {
    using betaf::KernelFamily;
    std::vector<double> p = {log_uniform(rng, 0.3, 5.0), log_uniform(rng, 0.3, 5.0)};
    switch (fam) {
        case KernelFamily::gb1_power: p.insert(p.end(), {log_uniform(rng, 0.5, 3.0), uniform(rng, 5.0, 20.0)}); break;
        case KernelFamily::gb2_burr: p.insert(p.end(), {log_uniform(rng, 1.0, 4.0), uniform(rng, 3.0, 10.0)}); break;
        case KernelFamily::normal: p.insert(p.end(), {uniform(rng, -2.0, 8.0), uniform(rng, 1.0, 5.0)}); break;
        case KernelFamily::scaled_t2:
            p = {log_uniform(rng, 0.6, 10.0), log_uniform(rng, 0.6, 10.0)};
            break;
        case KernelFamily::logistic4: p.insert(p.end(), {uniform(rng, 0.0, 8.0), uniform(rng, 0.5, 3.0)}); break;
        case KernelFamily::exponential: p.push_back(log_uniform(rng, 0.1, 1.0)); break;
        case KernelFamily::weibull: p.insert(p.end(), {log_uniform(rng, 0.1, 1.0), log_uniform(rng, 0.5, 2.0)}); break;
    }
    return p;
}

// Edges at quantiles probs of d (plus the support ends), counts from n draws.
inline betaf::GroupedSample quantile_binned(const betaf::BetaFDistribution& d, const std::vector<double>& probs,
                                            std::size_t n, std::uint64_t seed) {
    std::vector<double> edges = {d.support().lower};
    for (double p : probs) edges.push_back(d.quantile(p));
    edges.push_back(std::isinf(d.support().upper) ? d.support().upper : std::numeric_limits<double>::infinity());
    return betaf::simulate_grouped(d, n, edges, seed);
}

// False when more than 1e-9 of the mass lies between a finite upper support
// end and the largest double below it, where no x-space quadrature can see it.
inline bool mass_resolvable(const betaf::BetaFDistribution& d) {
    const double upper = d.support().upper;
    if (std::isinf(upper)) return true;
    return 1.0 - d.cdf(std::nextafter(upper, d.support().lower)) <= 1e-9;
}

inline std::vector<double> even_probs(std::size_t cells) {
    std::vector<double> p;
    for (std::size_t i = 1; i < cells; ++i) p.push_back(static_cast<double>(i) / static_cast<double>(cells));
    return p;
}

}  // namespace support
