#include <cmath>
#include <numbers>
#include <random>

#include "betaf/error.hpp"
#include "betaf/kernels.hpp"
#include "betaf/quadrature.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace betaf;
using support::close_rel;

namespace {

Kernel random_kernel(KernelFamily fam, std::mt19937_64& rng) {
    const std::vector<double> p = support::random_params(fam, rng);
    return Kernel(fam, ThetaF{{p.begin() + 2, p.end()}}, BetaShapes{p[0], p[1]});
}

double integral_of_pdf(const Kernel& k) {
    const Support s = k.support();
    const double med = k.quantile(0.5);
    const double spread = k.quantile(0.9) - k.quantile(0.1);
    const auto f = [&](double x) { return k.pdf(x); };
    quad::Options opt;
    opt.rel_tol = 1e-10;
    if (std::isinf(s.lower)) {
        const double left = quad::over_interval(f, -INFINITY, med, med, spread, opt).value;
        return left + quad::over_interval(f, med, INFINITY, med, spread, opt).value;
    }
    if (std::isinf(s.upper))
        return quad::gauss_kronrod(f, s.lower, med, opt).value + quad::half_line(f, med, spread, opt).value;
    return quad::gauss_kronrod(f, s.lower, s.upper, opt).value;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("names round trip") {
    for (KernelFamily f : kAllFamilies) CHECK(parse_family(family_name(f)) == f);
    CHECK_FALSE(parse_family("gumbel").has_value());
    CHECK(kernel_arity(KernelFamily::scaled_t2) == 0);
    CHECK(kernel_arity(KernelFamily::exponential) == 1);
    CHECK(kernel_arity(KernelFamily::gb2_burr) == 2);
}

TEST_CASE("cdf examples") {
    CHECK(kernel_cdf(KernelFamily::gb2_burr, ThetaF{{1.0, 1.0}}, {}, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(kernel_cdf(KernelFamily::scaled_t2, ThetaF{}, {1.0, 1.0}, 0.0) == 0.5);
    CHECK(close_rel(kernel_cdf(KernelFamily::weibull, ThetaF{{1.0, 2.0}}, {}, 1.0), 1.0 - std::exp(-1.0), 1e-15));
    CHECK(kernel_cdf(KernelFamily::exponential, ThetaF{{1.0}}, {}, -3.0) == 0.0);
    CHECK(kernel_cdf(KernelFamily::gb1_power, ThetaF{{2.0, 1.0}}, {}, 5.0) == 1.0);
}

TEST_CASE("pdf examples") {
    CHECK(kernel_pdf(KernelFamily::exponential, ThetaF{{2.0}}, {}, 0.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(close_rel(kernel_pdf(KernelFamily::normal, ThetaF{{0.0, 1.0}}, {}, 0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15));
    CHECK(kernel_pdf(KernelFamily::gb1_power, ThetaF{{2.0, 1.0}}, {}, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(kernel_pdf(KernelFamily::gb1_power, ThetaF{{2.0, 1.0}}, {}, 1.5) == 0.0);
}

TEST_CASE("quantile examples") {
    CHECK(kernel_quantile(KernelFamily::exponential, ThetaF{{1.0}}, {}, 1.0 - std::exp(-1.0)) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(kernel_quantile(KernelFamily::logistic4, ThetaF{{0.0, 1.0}}, {}, 0.5) == doctest::Approx(0.0).epsilon(1e-15));
    // Burr median: (x/b)^a = 1.
    CHECK(close_rel(kernel_quantile(KernelFamily::gb2_burr, ThetaF{{2.724, 8.297}}, {}, 0.5), 8.297, 1e-14));
    CHECK(kernel_quantile(KernelFamily::gb1_power, ThetaF{{2.0, 3.0}}, {}, 1.0) == 3.0);
    CHECK(kernel_quantile(KernelFamily::exponential, ThetaF{{1.0}}, {}, 0.0) == 0.0);
    CHECK_THROWS_AS(kernel_quantile(KernelFamily::normal, ThetaF{{0.0, 1.0}}, {}, 0.0), DomainError);
    CHECK_THROWS_AS(kernel_quantile(KernelFamily::logistic4, ThetaF{{0.0, 1.0}}, {}, 1.0), DomainError);
}

TEST_CASE("cdf gradient examples") {
    CHECK(close_rel(kernel_cdf_grad(KernelFamily::exponential, ThetaF{{1.0}}, {}, 1.0)[0], std::exp(-1.0), 1e-14));
    CHECK(close_rel(kernel_cdf_grad(KernelFamily::normal, ThetaF{{0.0, 1.0}}, {}, 0.0)[0],
                    -1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-14));
    CHECK(close_rel(kernel_cdf_grad(KernelFamily::gb1_power, ThetaF{{1.0, 2.0}}, {}, 1.0)[1], -0.25, 1e-14));
    CHECK(kernel_cdf_grad(KernelFamily::scaled_t2, ThetaF{}, {2.0, 3.0}, 1.0).empty());
}

TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(Kernel(KernelFamily::gb2_burr, ThetaF{{-1.0, 2.0}}, {}), DomainError);
    CHECK_THROWS_AS(Kernel(KernelFamily::normal, ThetaF{{0.0, 0.0}}, {}), DomainError);
    CHECK_THROWS_AS(Kernel(KernelFamily::exponential, ThetaF{{1.0, 2.0}}, {}), DomainError);
    CHECK_THROWS_AS(Kernel(KernelFamily::weibull, ThetaF{{1.0, NAN}}, {}), DomainError);
    CHECK_NOTHROW(Kernel(KernelFamily::logistic4, ThetaF{{-5.0, 1.0}}, {}));
}

TEST_CASE("supports") {
    CHECK(Kernel(KernelFamily::gb1_power, ThetaF{{1.0, 4.0}}, {}).support().upper == 4.0);
    CHECK(Kernel(KernelFamily::weibull, ThetaF{{1.0, 1.0}}, {}).support().lower == 0.0);
    CHECK(std::isinf(Kernel(KernelFamily::normal, ThetaF{{1.0, 1.0}}, {}).support().lower));
}

TEST_CASE("monotone cdf, nonnegative pdf, unit mass") {
    std::mt19937_64 rng(21);
    for (KernelFamily fam : kAllFamilies) {
        for (int trial = 0; trial < 10; ++trial) {
            const Kernel k = random_kernel(fam, rng);
            const double lo = k.quantile(1e-6);
            const double hi = k.quantile(1.0 - 1e-6);
            double prev = 0.0;
            for (int i = 0; i <= 1000; ++i) {
                const double x = lo + (hi - lo) * i / 1000.0;
                const double c = k.cdf(x);
                CHECK(c >= prev);
                CHECK(k.pdf(x) >= 0.0);
                prev = c;
            }
            CHECK(std::fabs(integral_of_pdf(k) - 1.0) < 1e-6);
        }
    }
}

TEST_CASE("quantile inverts cdf") {
    std::mt19937_64 rng(22);
    for (KernelFamily fam : kAllFamilies) {
        for (int trial = 0; trial < 20; ++trial) {
            const Kernel k = random_kernel(fam, rng);
            const double p = support::uniform(rng, 0.001, 0.999);
            CHECK(std::fabs(k.cdf(k.quantile(p)) - p) < 1e-8);
        }
    }
}

TEST_CASE("cdf gradient matches finite differences") {
    std::mt19937_64 rng(23);
    for (KernelFamily fam : kAllFamilies) {
        if (kernel_arity(fam) == 0) continue;
        for (int trial = 0; trial < 100; ++trial) {
            const std::vector<double> p = support::random_params(fam, rng);
            const ThetaF th{{p.begin() + 2, p.end()}};
            const Kernel k(fam, th, {p[0], p[1]});
            const double x = k.quantile(support::uniform(rng, 0.02, 0.98));
            const std::vector<double> g = k.cdf_grad(x);
            for (std::size_t j = 0; j < th.size(); ++j) {
                const double h = 1e-5 * std::max(1.0, std::fabs(th[j]));
                ThetaF up = th;
                ThetaF dn = th;
                up.values[j] += h;
                dn.values[j] -= h;
                const double fd = (Kernel(fam, up, {}).cdf(x) - Kernel(fam, dn, {}).cdf(x)) / (2.0 * h);
                CHECK(close_rel(g[j], fd, 1e-4, 1e-9));
            }
        }
    }
}

TEST_CASE("symmetric scaled t") {
    for (double a : {0.7, 2.0, 9.0}) {
        const Kernel k(KernelFamily::scaled_t2, ThetaF{}, {a, a});
        for (double x : {0.1, 1.0, 3.0, 40.0}) CHECK(std::fabs(k.cdf(-x) + k.cdf(x) - 1.0) < 1e-15);
    }
}

TEST_CASE("log cdf pair in the far tails") {
    const Kernel n(KernelFamily::normal, ThetaF{{0.0, 1.0}}, {});
    const TailPair t = n.log_cdf_pair(-40.0);
    // ln Phi(-40) = -804.6084420137538 (asymptotic expansion).
    CHECK(close_rel(t.lower, -804.60844201375380, 1e-12));
    CHECK(t.upper == doctest::Approx(0.0));
    const Kernel l(KernelFamily::logistic4, ThetaF{{0.0, 1.0}}, {});
    CHECK(close_rel(l.log_cdf_pair(-800.0).lower, -800.0, 1e-15));
    CHECK(close_rel(l.log_cdf_pair(800.0).upper, -800.0, 1e-15));
}

}
