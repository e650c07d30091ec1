#include <cmath>
#include <numbers>

#include "betaf/quadrature.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace betaf::quad;
using support::close_rel;

TEST_SUITE("quadrature") {

TEST_CASE("Gauss-Kronrod on smooth finite intervals") {
    const Result r = gauss_kronrod([](double x) { return x * x; }, 0.0, 1.0);
    CHECK(r.converged);
    CHECK(close_rel(r.value, 1.0 / 3.0, 1e-14));
    const Result s = gauss_kronrod([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
    CHECK(close_rel(s.value, 2.0, 1e-12));
    const Result rev = gauss_kronrod([](double x) { return x; }, 1.0, 0.0);
    CHECK(close_rel(rev.value, -0.5, 1e-14));
}

TEST_CASE("adaptive refinement handles an endpoint singularity") {
    Options opt;
    opt.rel_tol = 1e-10;
    const Result r = gauss_kronrod([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, opt);
    CHECK(r.converged);
    CHECK(close_rel(r.value, 2.0, 1e-8));
}

TEST_CASE("infinite ranges") {
    const Result h = half_line([](double x) { return std::exp(-x); }, 0.0, 1.0);
    CHECK(h.converged);
    CHECK(close_rel(h.value, 1.0, 1e-10));
    const Result w = whole_line([](double x) { return std::exp(-x * x); }, 0.0, 1.0);
    CHECK(w.converged);
    CHECK(close_rel(w.value, std::sqrt(std::numbers::pi), 1e-10));
    const Result lo = over_interval([](double x) { return std::exp(x); }, -INFINITY, 0.0, 0.0, 1.0);
    CHECK(close_rel(lo.value, 1.0, 1e-10));
    // Power tail x^-3 on [1, inf).
    const Result p = half_line([](double x) { return 2.0 / (x * x * x); }, 1.0, 1.0);
    CHECK(close_rel(p.value, 1.0, 1e-8));
}

TEST_CASE("divergent integral is not reported as converged") {
    Options opt;
    opt.max_intervals = 200;
    const Result r = half_line([](double x) { return 1.0 / (1.0 + x); }, 0.0, 1.0, opt);
    CHECK_FALSE((r.converged && std::isfinite(r.value) && r.value < 1e3));
}

TEST_CASE("tanh-sinh with endpoint singularities") {
    const Result l = tanh_sinh([](double x, double, double) { return std::log(x); }, 0.0, 1.0);
    CHECK(l.converged);
    CHECK(close_rel(l.value, -1.0, 1e-10));
    // Use the distance to the left end so x^-0.9 is accurate near 0.
    const Result p = tanh_sinh([](double, double dl, double) { return std::pow(dl, -0.9); }, 0.0, 1.0);
    CHECK(close_rel(p.value, 10.0, 1e-6));
    const Result z = tanh_sinh([](double x, double, double) { return x; }, 2.0, 2.0);
    CHECK(z.converged);
    CHECK(z.value == 0.0);
    const Result smooth = tanh_sinh([](double x, double, double) { return std::exp(x); }, 0.0, 2.0);
    CHECK(close_rel(smooth.value, std::exp(2.0) - 1.0, 1e-12));
}

}
