#pragma once

#include <cstddef>
#include <functional>

namespace betaf::quad {

struct Options {
    double rel_tol = 1e-8;
    double abs_tol = 0.0;
    std::size_t max_intervals = 4000;
};

struct Result {
    double value = 0.0;
    double abs_error = 0.0;
    bool converged = false;
    std::size_t evaluations = 0;
};

using Integrand = std::function<double(double)>;

// Globally adaptive 7/15-point Gauss-Kronrod on a finite interval.
Result gauss_kronrod(const Integrand& f, double a, double b, const Options& opt = {});

// Integral over [lower, +inf) with x = lower + scale * t / (1 - t).
Result half_line(const Integrand& f, double lower, double scale, const Options& opt = {});

// Integral over (-inf, +inf) with x = center + scale * t / (1 - t^2).
Result whole_line(const Integrand& f, double center, double scale, const Options& opt = {});

// Integral over [a, b] with b possibly infinite, a possibly -infinite; picks
// the matching map. center/scale steer where the maps put their resolution.
Result over_interval(const Integrand& f, double a, double b, double center, double scale,
                     const Options& opt = {});

// Integrand for tanh-sinh: receives the node x together with its distances
// to the left and right end, each computed without cancellation.
using EndpointIntegrand = std::function<double(double x, double from_left, double from_right)>;

// Double-exponential (tanh-sinh) rule on [a, b]; robust to integrable
// endpoint singularities. The tolerance is relative to the integral of |f|.
Result tanh_sinh(const EndpointIntegrand& f, double a, double b, double rel_tol = 1e-10, int max_level = 12);

}  // namespace betaf::quad
