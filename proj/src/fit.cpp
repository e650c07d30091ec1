#include "betaf/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "betaf/error.hpp"

namespace betaf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kArmijo = 1e-4;
constexpr double kMaxStep = 3.0;
constexpr double kGradQuadTol = 1e-10;

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

bool is_location(KernelFamily family, std::size_t k) {
    return k == 2 && (family == KernelFamily::normal || family == KernelFamily::logistic4);
}

// Objective on the unconstrained scale: minus the mean log-likelihood.
class Objective {
public:
    Objective(KernelFamily family, const GroupedSample& s, const ParameterTransform& tr)
        : family_(family), sample_(s), transform_(tr), n_(static_cast<double>(s.total())) {}

    double value(const Vec& u) const {
        try {
            const auto d = distribution(u);
            const double ll = log_likelihood(d, sample_).value;
            return std::isfinite(ll) ? -ll / n_ : kInf;
        } catch (const Error&) {
            return kInf;
        }
    }

    // Returns false when the gradient cannot be formed at u.
    bool gradient(const Vec& u, Vec& g) const {
        try {
            const auto d = distribution(u);
            GradientOptions go;
            go.quad_tol = kGradQuadTol;
            const std::vector<double> gt = log_likelihood_grad(d, sample_, go);
            const std::vector<double> jac = transform_.jacobian(to_std(u));
            g.resize(u.size());
            for (Eigen::Index k = 0; k < u.size(); ++k) g[k] = -gt[k] * jac[k] / n_;
            return g.allFinite();
        } catch (const Error&) {
            return false;
        }
    }

    std::vector<double> params(const Vec& u) const { return transform_.from_unconstrained(to_std(u)); }
    double total() const { return n_; }

private:
    static std::vector<double> to_std(const Vec& u) { return {u.data(), u.data() + u.size()}; }
    BetaFDistribution distribution(const Vec& u) const {
        return BetaFDistribution::from_params(family_, transform_.from_unconstrained(to_std(u)));
    }

    KernelFamily family_;
    const GroupedSample& sample_;
    const ParameterTransform& transform_;
    double n_;
};

struct StartOutcome {
    std::vector<double> params;
    double loglik = -kInf;
    bool finite = false;
    bool converged = false;
    bool cap_hit = false;
    int iterations = 0;
    double grad_norm = kInf;
    std::string message;
    std::vector<double> trace;
};

// Clamp the capped coordinates; returns true when any coordinate sits on the cap.
bool clamp_to_cap(Vec& u, const std::vector<bool>& capped, double cap) {
    bool hit = false;
    for (Eigen::Index k = 0; k < u.size(); ++k) {
        if (!capped[static_cast<std::size_t>(k)]) continue;
        if (u[k] >= cap) {
            u[k] = cap;
            hit = true;
        } else if (u[k] <= -cap) {
            u[k] = -cap;
            hit = true;
        }
    }
    return hit;
}

Mat fd_hessian(const Objective& obj, const Vec& u, const Vec& g0) {
    const Eigen::Index n = u.size();
    Mat h(n, n);
    constexpr double step = 1e-4;
    for (Eigen::Index k = 0; k < n; ++k) {
        Vec up = u;
        Vec dn = u;
        up[k] += step;
        dn[k] -= step;
        Vec gu;
        Vec gd;
        if (!obj.gradient(up, gu) || !obj.gradient(dn, gd)) {
            h.col(k) = Vec::Zero(n);
            h(k, k) = std::max(1.0, std::fabs(g0[k]));
            continue;
        }
        h.col(k) = (gu - gd) / (2.0 * step);
    }
    return 0.5 * (h + h.transpose());
}

// Newton direction with Levenberg damping until the system is positive definite.
Vec newton_direction(const Mat& hess, const Vec& g) {
    const Eigen::Index n = g.size();
    double damping = 0.0;
    const double scale = std::max(1e-8, hess.diagonal().cwiseAbs().maxCoeff());
    for (int attempt = 0; attempt < 30; ++attempt) {
        const Mat m = hess + damping * Mat::Identity(n, n);
        Eigen::LLT<Mat> llt(m);
        if (llt.info() == Eigen::Success) return -llt.solve(g);
        damping = damping == 0.0 ? 1e-6 * scale : damping * 10.0;
    }
    return -g;
}

StartOutcome run_start(const Objective& obj, std::vector<double> u_start, const std::vector<bool>& capped,
                       const OptimizerConfig& cfg, const GroupedSample& s) {
    StartOutcome out;
    Vec u = Eigen::Map<const Vec>(u_start.data(), static_cast<Eigen::Index>(u_start.size()));
    const Eigen::Index n = u.size();
    out.cap_hit = clamp_to_cap(u, capped, cfg.coordinate_cap);
    double f = obj.value(u);
    Vec g;
    if (!std::isfinite(f) || !obj.gradient(u, g)) {
        out.message = "non-finite likelihood at the start";
        return out;
    }
    out.finite = true;
    out.trace.push_back(-f * obj.total());
    Mat h_inv = Mat::Identity(n, n);
    bool first_update = true;

    int iter = 0;
    for (; iter < cfg.max_iter; ++iter) {
        if (g.cwiseAbs().maxCoeff() <= cfg.grad_tol) break;

        Vec p;
        if (cfg.hessian_mode == HessianMode::finite_difference)
            p = newton_direction(fd_hessian(obj, u, g), g);
        else
            p = -h_inv * g;
        if (!p.allFinite() || g.dot(p) >= 0.0) {
            p = -g;
            h_inv = Mat::Identity(n, n);
            first_update = true;
        }
        const double pmax = p.cwiseAbs().maxCoeff();
        if (pmax > kMaxStep) p *= kMaxStep / pmax;

        double t = 1.0;
        const double slope = g.dot(p);
        Vec u_try;
        double f_try = kInf;
        bool accepted = false;
        bool hit = false;
        while (t * p.cwiseAbs().maxCoeff() >= cfg.step_tol) {
            u_try = u + t * p;
            hit = clamp_to_cap(u_try, capped, cfg.coordinate_cap);
            f_try = obj.value(u_try);
            if (std::isfinite(f_try) && f_try <= f + kArmijo * t * slope) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted && cfg.hessian_mode == HessianMode::bfgs_accumulated && !first_update) {
            // Stale curvature; retry from steepest descent.
            h_inv = Mat::Identity(n, n);
            first_update = true;
            continue;
        }
        if (!accepted) {
            out.message = "line search could not improve the likelihood";
            break;
        }
        Vec g_new;
        if (!obj.gradient(u_try, g_new)) {
            out.message = "gradient failed at an accepted point";
            break;
        }
        const Vec step = u_try - u;
        const Vec dy = g_new - g;
        u = u_try;
        f = f_try;
        g = g_new;
        out.cap_hit = hit;
        out.trace.push_back(-f * obj.total());

        if (cfg.hessian_mode == HessianMode::bfgs_accumulated) {
            const double sy = step.dot(dy);
            if (sy > 1e-12 * step.norm() * dy.norm()) {
                if (first_update) {
                    h_inv = Mat::Identity(n, n) * (sy / dy.dot(dy));
                    first_update = false;
                }
                const double rho = 1.0 / sy;
                const Mat left = Mat::Identity(n, n) - rho * step * dy.transpose();
                h_inv = left * h_inv * left.transpose() + rho * step * step.transpose();
            }
        }
        if (step.cwiseAbs().maxCoeff() < cfg.step_tol) {
            ++iter;
            out.message = "step below tolerance";
            break;
        }
    }

    out.iterations = iter;
    out.grad_norm = g.cwiseAbs().maxCoeff();
    out.loglik = -f * obj.total();
    out.params = obj.params(u);
    out.converged = out.grad_norm <= cfg.grad_tol && !out.cap_hit;
    if (out.cap_hit && out.message.empty()) out.message = "a transformed coordinate reached the cap";
    if (!out.converged && out.message.empty()) out.message = "iteration limit reached";
    if (s.occupied_cells() < 2) {
        out.converged = false;
        out.message = "all observations fall in one cell; the maximum likelihood estimate does not exist";
    }
    return out;
}

struct SampleSummary {
    double mean;
    double sd;
    double mean_log;
    double sd_log;
};

// Count-weighted moments of representative points (group means when given,
// otherwise bin midpoints; open bins use their finite end plus half the
// neighbouring width).
SampleSummary summarize(const GroupedSample& s) {
    const std::size_t r = s.cells();
    double w = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    double wl = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        if (s.counts[i] == 0) continue;
        double lo = s.edges[i];
        double hi = s.edges[i + 1];
        double x;
        if (s.group_means) {
            x = (*s.group_means)[i];
        } else if (std::isinf(hi)) {
            const double width = i > 0 && std::isfinite(lo - s.edges[i - 1]) ? lo - s.edges[i - 1] : 1.0;
            x = lo + 0.5 * width;
        } else if (std::isinf(lo)) {
            const double width = i + 2 < s.edges.size() && std::isfinite(s.edges[i + 2]) ? s.edges[i + 2] - hi : 1.0;
            x = hi - 0.5 * width;
        } else {
            x = 0.5 * (lo + hi);
        }
        const double c = static_cast<double>(s.counts[i]);
        w += c;
        m1 += c * x;
        m2 += c * x * x;
        if (x > 0.0) {
            wl += c;
            l1 += c * std::log(x);
            l2 += c * std::log(x) * std::log(x);
        }
    }
    SampleSummary out{};
    out.mean = w > 0 ? m1 / w : 1.0;
    const double var = w > 0 ? m2 / w - out.mean * out.mean : 0.0;
    out.sd = var > 0 ? std::sqrt(var) : std::max(std::fabs(out.mean) * 0.5, 1.0);
    out.mean_log = wl > 0 ? l1 / wl : 0.0;
    const double var_log = wl > 0 ? l2 / wl - out.mean_log * out.mean_log : 0.0;
    out.sd_log = var_log > 1e-12 ? std::sqrt(var_log) : 1.0;
    return out;
}

// Alpha giving the skew-t (beta = 1) mean m, by bisection on log alpha.
double skewt_alpha_for_mean(double m) {
    const auto mean_at = [](double alpha) {
        return BetaFDistribution({alpha, 1.0}, KernelFamily::scaled_t2, ThetaF{}).mean_analytic().value();
    };
    double lo = std::log(0.51);
    double hi = std::log(1e4);
    if (m <= mean_at(std::exp(lo))) return std::exp(lo);
    if (m >= mean_at(std::exp(hi))) return std::exp(hi);
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mean_at(std::exp(mid)) < m)
            lo = mid;
        else
            hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

}  // namespace

void OptimizerConfig::validate() const {
    if (!(grad_tol > 0.0) || !(step_tol > 0.0) || !(quad_tol > 0.0)) throw DomainError("optimizer tolerances must be positive");
    if (max_iter < 1) throw DomainError("max_iter must be at least 1");
    if (!(coordinate_cap > 0.0)) throw DomainError("coordinate cap must be positive");
}

std::vector<double> FitResult::params() const {
    std::vector<double> out = {shapes.alpha, shapes.beta};
    out.insert(out.end(), theta_f.values.begin(), theta_f.values.end());
    return out;
}

ParameterTransform::ParameterTransform(KernelFamily family, double x_max_finite)
    : family_(family), x_max_(x_max_finite) {
    kinds_ = {Kind::log, Kind::log};
    for (std::size_t k = 0; k < kernel_arity(family); ++k) {
        const std::size_t idx = 2 + k;
        if (is_location(family, idx))
            kinds_.push_back(Kind::identity);
        else if (family == KernelFamily::gb1_power && idx == 3 && x_max_ > 0.0 && std::isfinite(x_max_))
            kinds_.push_back(Kind::shifted_exp);
        else
            kinds_.push_back(Kind::log);
    }
}

std::vector<double> ParameterTransform::to_unconstrained(std::span<const double> params) const {
    if (params.size() != kinds_.size())
        throw DomainError("expected " + std::to_string(kinds_.size()) + " parameters for " +
                          std::string(family_name(family_)));
    std::vector<double> u(params.size());
    for (std::size_t k = 0; k < params.size(); ++k) {
        const double v = params[k];
        switch (kinds_[k]) {
            case Kind::log:
                if (!(v > 0.0)) throw DomainError("parameter " + std::to_string(k) + " must be positive");
                u[k] = std::log(v);
                break;
            case Kind::identity:
                if (!std::isfinite(v)) throw DomainError("parameter " + std::to_string(k) + " must be finite");
                u[k] = v;
                break;
            case Kind::shifted_exp:
                if (!(v >= x_max_))
                    throw DomainError("GB1 upper end b must be at least the largest finite edge");
                u[k] = std::log(v / x_max_ - 1.0);
                break;
        }
    }
    return u;
}

std::vector<double> ParameterTransform::from_unconstrained(std::span<const double> u) const {
    if (u.size() != kinds_.size()) throw DomainError("unconstrained vector has the wrong length");
    std::vector<double> p(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
        switch (kinds_[k]) {
            case Kind::log: p[k] = std::exp(u[k]); break;
            case Kind::identity: p[k] = u[k]; break;
            case Kind::shifted_exp: p[k] = x_max_ * (1.0 + std::exp(u[k])); break;
        }
    }
    return p;
}

std::vector<double> ParameterTransform::jacobian(std::span<const double> u) const {
    std::vector<double> j(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
        switch (kinds_[k]) {
            case Kind::log: j[k] = std::exp(u[k]); break;
            case Kind::identity: j[k] = 1.0; break;
            case Kind::shifted_exp: j[k] = x_max_ * std::exp(u[k]); break;
        }
    }
    return j;
}

std::vector<std::vector<double>> auto_starts(KernelFamily family, const GroupedSample& s) {
    const SampleSummary st = summarize(s);
    const double x_max = s.largest_finite_edge();
    const double m = st.mean;
    std::vector<double> base = {1.0, 1.0};
    switch (family) {
        case KernelFamily::gb1_power: {
            double b = std::max(1.2 * x_max, 2.0 * std::fabs(m));
            if (!(b > 0.0)) b = 1.0;
            const double a = m > 0.0 && m < b ? m / (b - m) : 1.0;
            base.insert(base.end(), {a, b});
            break;
        }
        case KernelFamily::gb2_burr:
            base.insert(base.end(), {std::numbers::pi / (std::sqrt(3.0) * st.sd_log), std::exp(st.mean_log)});
            break;
        case KernelFamily::normal: base.insert(base.end(), {m, st.sd}); break;
        case KernelFamily::scaled_t2: break;
        case KernelFamily::logistic4: base.insert(base.end(), {m, st.sd * std::sqrt(3.0) / std::numbers::pi}); break;
        case KernelFamily::exponential: base.push_back(m > 0.0 ? 1.0 / m : 1.0); break;
        case KernelFamily::weibull: base.insert(base.end(), {m > 0.0 ? 1.0 / m : 1.0, 1.0}); break;
    }

    std::vector<std::vector<double>> starts = {base};
    for (std::size_t k = 0; k < base.size(); ++k) {
        for (double factor : {0.5, 2.0}) {
            std::vector<double> p = base;
            if (family == KernelFamily::gb1_power && k == 3)
                p[k] = x_max + (base[k] - x_max) * factor;
            else if (is_location(family, k) && base[k] == 0.0)
                p[k] = factor < 1.0 ? -st.sd : st.sd;
            else
                p[k] = base[k] * factor;
            starts.push_back(std::move(p));
        }
    }
    if (family == KernelFamily::scaled_t2) starts.push_back({skewt_alpha_for_mean(m), 1.0});
    return starts;
}

FitResult fit_family(KernelFamily family, const GroupedSample& s, const OptimizerConfig& cfg) {
    cfg.validate();
    s.validate();
    const ParameterTransform transform(family, s.largest_finite_edge());
    const Objective objective(family, s, transform);
    const std::vector<std::vector<double>> starts = cfg.starts.empty() ? auto_starts(family, s) : cfg.starts;
    if (starts.empty()) throw FitError("no starting points");

    std::vector<bool> capped;
    {
        // Locations are not capped; they carry the data's units.
        const std::size_t dim = 2 + kernel_arity(family);
        for (std::size_t k = 0; k < dim; ++k) capped.push_back(!is_location(family, k));
    }

    std::vector<StartOutcome> outcomes;
    std::string failures;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        try {
            outcomes.push_back(run_start(objective, transform.to_unconstrained(starts[i]), capped, cfg, s));
        } catch (const DomainError& e) {
            StartOutcome bad;
            bad.message = e.what();
            outcomes.push_back(bad);
        }
        if (!outcomes.back().finite) failures += " [" + std::to_string(i) + "] " + outcomes.back().message + ";";
    }

    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (!outcomes[i].converged) continue;
        if (!best || outcomes[i].loglik > outcomes[*best].loglik) best = i;
    }
    if (!best) {
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            if (!outcomes[i].finite) continue;
            if (!best || outcomes[i].loglik > outcomes[*best].loglik) best = i;
        }
    }
    if (!best)
        throw FitError(std::string(family_name(family)) + ": every start gave a non-finite likelihood:" + failures);

    const StartOutcome& win = outcomes[*best];
    FitResult out;
    out.family = family;
    out.shapes = {win.params[0], win.params[1]};
    out.theta_f.values.assign(win.params.begin() + 2, win.params.end());
    out.loglik = win.loglik;
    out.converged = win.converged;
    out.iterations = win.iterations;
    out.grad_norm = win.grad_norm;
    out.start_index = *best;
    out.cap_hit = win.cap_hit;
    out.message = win.converged ? "converged" : win.message;
    out.trace = win.trace;
    out.metrics = compute_metrics(out.distribution(), s, cfg.quad_tol);
    return out;
}

}  // namespace betaf
