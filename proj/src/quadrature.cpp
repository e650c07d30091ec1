#include "betaf/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace betaf::quad {
namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
};

// One 15-point Kronrod panel with the QUADPACK error heuristic.
Segment kronrod15(const Integrand& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::fabs(resk);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        const double sum = f1[j] + f2[j];
        resk += kWgk[j] * sum;
        resabs += kWgk[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
        if (j % 2 == 1) resg += kWg[j / 2] * sum;
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[7] * std::fabs(fc - mean);
    for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::fabs(f1[j] - mean) + std::fabs(f2[j] - mean));
    const double ahalf = std::fabs(half);
    resk *= half;
    resg *= half;
    resabs *= ahalf;
    resasc *= ahalf;
    double err = std::fabs(resk - resg);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    if (!std::isfinite(resk)) err = std::numeric_limits<double>::infinity();
    return {a, b, resk, err};
}

bool heap_order(const Segment& x, const Segment& y) { return x.error < y.error; }

}  // namespace

Result gauss_kronrod(const Integrand& f, double a, double b, const Options& opt) {
    Result out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    std::vector<Segment> heap;
    heap.push_back(kronrod15(f, a, b));
    out.evaluations = 15;
    double total = heap.front().value;
    double error = heap.front().error;
    while (true) {
        if (error <= std::max(opt.abs_tol, opt.rel_tol * std::fabs(total))) {
            out.converged = std::isfinite(total);
            break;
        }
        if (heap.size() >= opt.max_intervals) break;
        std::pop_heap(heap.begin(), heap.end(), heap_order);
        const Segment worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) {
            // Interval cannot be split further; keep it and stop.
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end(), heap_order);
            break;
        }
        const Segment left = kronrod15(f, worst.a, mid);
        const Segment right = kronrod15(f, mid, worst.b);
        out.evaluations += 30;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), heap_order);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), heap_order);
        // Re-sum instead of updating incrementally to avoid drift.
        total = 0.0;
        error = 0.0;
        for (const Segment& s : heap) {
            total += s.value;
            error += s.error;
        }
    }
    out.value = total;
    out.abs_error = error;
    return out;
}

Result half_line(const Integrand& f, double lower, double scale, const Options& opt) {
    const auto mapped = [&](double t) {
        const double one_minus = 1.0 - t;
        const double x = lower + scale * t / one_minus;
        const double fx = f(x);
        if (fx == 0.0) return 0.0;
        return fx * scale / (one_minus * one_minus);
    };
    return gauss_kronrod(mapped, 0.0, 1.0, opt);
}

Result whole_line(const Integrand& f, double center, double scale, const Options& opt) {
    const auto mapped = [&](double t) {
        const double d = (1.0 - t) * (1.0 + t);
        const double x = center + scale * t / d;
        const double fx = f(x);
        if (fx == 0.0) return 0.0;
        return fx * scale * (1.0 + t * t) / (d * d);
    };
    // Split at the center so the peak sits on a panel boundary.
    Options half = opt;
    half.max_intervals = std::max<std::size_t>(1, opt.max_intervals / 2);
    const Result left = gauss_kronrod(mapped, -1.0, 0.0, half);
    const Result right = gauss_kronrod(mapped, 0.0, 1.0, half);
    Result out;
    out.value = left.value + right.value;
    out.abs_error = left.abs_error + right.abs_error;
    out.evaluations = left.evaluations + right.evaluations;
    out.converged = left.converged && right.converged;
    if (!out.converged)
        out.converged = std::isfinite(out.value) &&
                        out.abs_error <= std::max(opt.abs_tol, opt.rel_tol * std::fabs(out.value));
    return out;
}

Result over_interval(const Integrand& f, double a, double b, double center, double scale,
                     const Options& opt) {
    const bool lo_inf = std::isinf(a);
    const bool hi_inf = std::isinf(b);
    if (lo_inf && hi_inf) return whole_line(f, center, scale, opt);
    if (hi_inf) return half_line(f, a, scale, opt);
    if (lo_inf) return half_line([&](double x) { return f(-x); }, -b, scale, opt);
    return gauss_kronrod(f, a, b, opt);
}

Result tanh_sinh(const EndpointIntegrand& f, double a, double b, double rel_tol, int max_level) {
    constexpr double kTmax = 6.0;
    constexpr double kHalfPi = std::numbers::pi / 2.0;
    const double width = b - a;
    Result out;
    if (width == 0.0) {
        out.converged = true;
        return out;
    }

    double abs_sum = 0.0;
    const auto node = [&](double t) {
        const double u = kHalfPi * std::sinh(t);
        const double e = std::exp(-2.0 * std::fabs(u));
        const double near = width * e / (1.0 + e);
        if (near == 0.0) return 0.0;
        const double far = width / (1.0 + e);
        const double w = 0.5 * width * kHalfPi * std::cosh(t) * 4.0 * e / ((1.0 + e) * (1.0 + e));
        double fx;
        if (t < 0.0)
            fx = f(a + near, near, far);
        else
            fx = f(b - near, far, near);
        ++out.evaluations;
        if (fx == 0.0) return 0.0;
        abs_sum += w * std::fabs(fx);
        return w * fx;
    };

    // Level 0: unit spacing.
    double h = 1.0;
    double sum = 0.0;
    const int n0 = static_cast<int>(kTmax);
    for (int j = -n0; j <= n0; ++j) sum += node(static_cast<double>(j));
    double estimate = h * sum;
    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        double fresh = 0.0;
        const int jmax = static_cast<int>(kTmax / h);
        for (int j = 1; j <= jmax; j += 2) {
            fresh += node(j * h);
            fresh += node(-j * h);
        }
        const double next = 0.5 * estimate + h * fresh;
        // abs_sum covers every node so far, so abs_sum * h estimates the
        // integral of |f| at this level.
        const double abs_scale = abs_sum * h;
        const double diff = std::fabs(next - estimate);
        estimate = next;
        out.abs_error = diff;
        if (level >= 3 && diff <= rel_tol * abs_scale) {
            out.converged = std::isfinite(estimate);
            break;
        }
    }
    out.value = estimate;
    return out;
}

}  // namespace betaf::quad
