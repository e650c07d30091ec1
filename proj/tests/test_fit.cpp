#include <cmath>
#include <random>

#include "betaf/error.hpp"
#include "betaf/fit.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace betaf;
using support::close_rel;

namespace {

GroupedSample binned(KernelFamily fam, const std::vector<double>& truth, std::size_t cells, std::size_t n,
                     std::uint64_t seed) {
    const auto d = BetaFDistribution::from_params(fam, truth);
    return support::quantile_binned(d, support::even_probs(cells), n, seed);
}

// Inverse of a symmetric 3x3 matrix by cofactors.
std::array<std::array<double, 3>, 3> inverse3(const std::array<std::array<double, 3>, 3>& m) {
    std::array<std::array<double, 3>, 3> c{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
            c[j][i] = m[i1][j1] * m[i2][j2] - m[i1][j2] * m[i2][j1];
        }
    const double det = m[0][0] * c[0][0] + m[0][1] * c[1][0] + m[0][2] * c[2][0];
    for (auto& row : c)
        for (double& v : row) v /= det;
    return c;
}

}  // namespace

TEST_SUITE("fit") {

TEST_CASE("transform round trips") {
    const ParameterTransform be(KernelFamily::exponential, 25.0);
    const std::vector<double> p = {1.700, 0.799, 0.257};
    const std::vector<double> back = be.from_unconstrained(be.to_unconstrained(p));
    for (std::size_t k = 0; k < p.size(); ++k) CHECK(close_rel(back[k], p[k], 1e-12));
    CHECK(be.to_unconstrained(std::vector<double>{1.0, 1.0, 1.0})[0] == 0.0);

    const ParameterTransform bn(KernelFamily::normal, 25.0);
    CHECK(bn.to_unconstrained(std::vector<double>{1.0, 1.0, -3.5, 2.0})[2] == -3.5);

    const ParameterTransform gb1(KernelFamily::gb1_power, 25.0);
    const std::vector<double> edge = {2.0, 3.0, 1.5, 25.0};
    const std::vector<double> u = gb1.to_unconstrained(edge);
    CHECK(u[3] == -INFINITY);
    CHECK(gb1.from_unconstrained(u)[3] == 25.0);
    CHECK(gb1.from_unconstrained(gb1.to_unconstrained(std::vector<double>{2.0, 3.0, 1.5, 40.0}))[3] ==
          doctest::Approx(40.0).epsilon(1e-14));
    CHECK_THROWS_AS((void)gb1.to_unconstrained(std::vector<double>{2.0, 3.0, 1.5, 20.0}), DomainError);
    CHECK_THROWS_AS((void)be.to_unconstrained(std::vector<double>{-1.0, 1.0, 1.0}), DomainError);
    CHECK_THROWS_AS((void)be.to_unconstrained(std::vector<double>{1.0, 1.0}), DomainError);
}

TEST_CASE("transform Jacobian") {
    const ParameterTransform gb1(KernelFamily::gb1_power, 25.0);
    const std::vector<double> u = {0.3, -0.2, 0.1, -1.0};
    const std::vector<double> j = gb1.jacobian(u);
    for (std::size_t k = 0; k < u.size(); ++k) {
        std::vector<double> up = u;
        std::vector<double> dn = u;
        up[k] += 1e-6;
        dn[k] -= 1e-6;
        const double fd = (gb1.from_unconstrained(up)[k] - gb1.from_unconstrained(dn)[k]) / 2e-6;
        CHECK(close_rel(j[k], fd, 1e-8));
    }
}

TEST_CASE("starting points") {
    GroupedSample s;
    s.edges = {0.0, 2.5, 5.0, 10.0, 25.0, INFINITY};
    s.counts = {20, 30, 30, 15, 5};
    s.group_means = std::vector<double>{1.5, 3.7, 7.0, 14.0, 40.0};
    for (KernelFamily fam : kAllFamilies) {
        const auto starts = auto_starts(fam, s);
        CHECK(starts.size() >= 3);
        CHECK(starts[0][0] == 1.0);
        CHECK(starts[0][1] == 1.0);
        for (const auto& p : starts) {
            CHECK(p.size() == 2 + kernel_arity(fam));
            CHECK_NOTHROW(BetaFDistribution::from_params(fam, p));
            if (fam == KernelFamily::gb1_power) CHECK(p[3] > 25.0);
        }
    }
    const double mean = empirical_mean(s);
    CHECK(close_rel(auto_starts(KernelFamily::exponential, s)[0][2], 1.0 / mean, 1e-14));
    const auto gb2 = auto_starts(KernelFamily::gb2_burr, s);
    CHECK(gb2.size() == 9);
    CHECK(close_rel(gb2[1][0], 0.5, 1e-15));
    CHECK(close_rel(gb2[2][0], 2.0, 1e-15));
    CHECK(auto_starts(KernelFamily::scaled_t2, s).size() == 6);
}

TEST_CASE("config validation") {
    OptimizerConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.grad_tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = {};
    cfg.max_iter = 0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("exponential recovery within three standard errors") {
    const double a = 0.4;
    const GroupedSample s = binned(KernelFamily::exponential, {1.0, 1.0, a}, 12, 100000, 11);
    const FitResult r = fit_family(KernelFamily::exponential, s);
    REQUIRE(r.converged);
    CHECK(r.grad_norm <= 1e-6);

    // Standard errors from the observed information (finite-difference Hessian).
    const std::vector<double> p = r.params();
    const auto ll = [&](std::vector<double> q) {
        return log_likelihood(BetaFDistribution::from_params(KernelFamily::exponential, q), s).value;
    };
    std::array<std::array<double, 3>, 3> info{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double hi = 1e-3 * p[i];
            const double hj = 1e-3 * p[j];
            auto pp = p, pm = p, mp = p, mm = p;
            pp[i] += hi; pp[j] += hj;
            pm[i] += hi; pm[j] -= hj;
            mp[i] -= hi; mp[j] += hj;
            mm[i] -= hi; mm[j] -= hj;
            info[i][j] = -(ll(pp) - ll(pm) - ll(mp) + ll(mm)) / (4.0 * hi * hj);
        }
    const auto cov = inverse3(info);
    const double se = std::sqrt(cov[2][2]);
    CAPTURE(p);
    CAPTURE(se);
    CHECK(se > 0.0);
    CHECK(std::fabs(p[2] - a) < 3.0 * se);
}

TEST_CASE("GB2 recovery within ten percent") {
    const std::vector<double> truth = {0.5, 1.1, 2.7, 8.3};
    const GroupedSample s = binned(KernelFamily::gb2_burr, truth, 15, 100000, 12);
    const FitResult r = fit_family(KernelFamily::gb2_burr, s);
    REQUIRE(r.converged);
    const std::vector<double> p = r.params();
    CAPTURE(p);
    for (std::size_t k = 0; k < truth.size(); ++k) CHECK(std::fabs(p[k] - truth[k]) < 0.1 * truth[k]);
    const double at_truth = log_likelihood(BetaFDistribution::from_params(KernelFamily::gb2_burr, truth), s).value;
    CHECK(r.loglik >= at_truth - 1e-6);
}

TEST_CASE("monotone ascent and metrics") {
    const GroupedSample s = binned(KernelFamily::weibull, {1.5, 0.9, 0.3, 1.1}, 10, 20000, 13);
    const FitResult r = fit_family(KernelFamily::weibull, s);
    REQUIRE(r.trace.size() >= 2);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] >= r.trace[i - 1]);
    CHECK(r.trace.back() == r.loglik);
    CHECK(r.metrics.sse >= 0.0);
    CHECK(r.metrics.est_mean.has_value());
}

TEST_CASE("degenerate sample does not crash") {
    GroupedSample s;
    s.edges = {0.0, 1.0, 2.0, INFINITY};
    s.counts = {0, 50, 0};
    for (KernelFamily fam : kAllFamilies) {
        CAPTURE(family_name(fam));
        FitResult r;
        CHECK_NOTHROW(r = fit_family(fam, s));
        CHECK((!r.converged || r.cap_hit));
        CHECK_FALSE(r.message.empty());
    }
}

TEST_CASE("every start failing is a fit error") {
    const GroupedSample s = binned(KernelFamily::exponential, {1.0, 1.0, 0.5}, 6, 1000, 14);
    OptimizerConfig cfg;
    cfg.starts = {{-1.0, 1.0, 1.0}, {1.0, 1.0, 0.0}};
    CHECK_THROWS_AS((void)fit_family(KernelFamily::exponential, s, cfg), FitError);
}

TEST_CASE("user starts and start index") {
    const GroupedSample s = binned(KernelFamily::exponential, {1.5, 0.8, 0.3}, 8, 20000, 15);
    OptimizerConfig cfg;
    cfg.starts = {{1.5, 0.8, 0.3}};
    const FitResult r = fit_family(KernelFamily::exponential, s, cfg);
    CHECK(r.start_index == 0);
    CHECK(r.converged);
}

TEST_CASE("deterministic") {
    const GroupedSample s = binned(KernelFamily::gb2_burr, {0.49, 1.111, 2.724, 8.297}, 10, 20000, 16);
    const FitResult a = fit_family(KernelFamily::gb2_burr, s);
    const FitResult b = fit_family(KernelFamily::gb2_burr, s);
    CHECK(a.params() == b.params());
    CHECK(a.loglik == b.loglik);
    CHECK(a.trace == b.trace);
    CHECK(a.start_index == b.start_index);
}

TEST_CASE("finite-difference Newton agrees with BFGS") {
    const GroupedSample s = binned(KernelFamily::exponential, {1.7, 0.8, 0.26}, 10, 50000, 17);
    const FitResult q = fit_family(KernelFamily::exponential, s);
    OptimizerConfig cfg;
    cfg.hessian_mode = HessianMode::finite_difference;
    const FitResult n = fit_family(KernelFamily::exponential, s, cfg);
    REQUIRE(q.converged);
    REQUIRE(n.converged);
    CHECK(std::fabs(q.loglik - n.loglik) < 1e-6);
}

TEST_CASE("scale equivariance of fitted cell probabilities") {
    for (KernelFamily fam : {KernelFamily::gb2_burr, KernelFamily::normal, KernelFamily::weibull,
                             KernelFamily::logistic4}) {
        CAPTURE(family_name(fam));
        const std::vector<double> truth = fam == KernelFamily::gb2_burr  ? std::vector<double>{0.5, 1.1, 2.7, 8.3}
                                          : fam == KernelFamily::normal  ? std::vector<double>{2.0, 0.5, 1.0, 4.0}
                                          : fam == KernelFamily::weibull ? std::vector<double>{1.5, 0.9, 0.3, 1.1}
                                                                         : std::vector<double>{2.0, 0.5, 3.0, 2.0};
        const GroupedSample s = binned(fam, truth, 10, 50000, 18);
        GroupedSample scaled = s;
        const double c = 10.0;
        for (double& e : scaled.edges) e *= c;
        if (scaled.group_means)
            for (double& m : *scaled.group_means) m *= c;
        OptimizerConfig cfg;
        cfg.grad_tol = 1e-9;
        const FitResult r1 = fit_family(fam, s, cfg);
        const FitResult r2 = fit_family(fam, scaled, cfg);
        REQUIRE(r1.converged);
        REQUIRE(r2.converged);
        const auto p1 = cell_probs(r1.distribution(), s).probs;
        const auto p2 = cell_probs(r2.distribution(), scaled).probs;
        for (std::size_t i = 0; i < p1.size(); ++i) CHECK(std::fabs(p1[i] - p2[i]) < 1e-6);
    }
}

}
