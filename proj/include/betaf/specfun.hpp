#pragma once

// Special functions used throughout the library. All functions are pure and
// thread-safe (no reliance on the global signgam of ::lgamma).

namespace betaf::specfun {

struct Accuracy {
    double rel_tol = 1e-15;
    int max_iter = 5000;

    // rel_tol in (0, 1e-6], max_iter >= 50.
    void validate() const;
};

// A probability together with its complement, each computed without
// cancellation (upper == 1 - lower up to rounding).
struct TailPair {
    double lower;
    double upper;
};

double log_gamma(double x);
double log_beta(double alpha, double beta);
double digamma(double x);

// 1/Gamma(z) for any real z; zero at the poles of Gamma.
double reciprocal_gamma(double z);

// Regularized incomplete beta I_x(alpha, beta).
double reg_inc_beta(double x, double alpha, double beta, const Accuracy& acc = {});

// I_x and 1 - I_x given both x and y = 1 - x. Supplying y separately keeps
// precision when x is within rounding of 1.
TailPair reg_inc_beta_pair(double x, double y, double alpha, double beta, const Accuracy& acc = {});

// Inverse of I_x in x. Throws NumericError (with the last iterate) when the
// bracketed Newton iteration does not converge.
double reg_inc_beta_inv(double p, double alpha, double beta, const Accuracy& acc = {});

// Inverse given p and q = 1 - p; returns x and 1 - x.
TailPair reg_inc_beta_inv_pair(double p, double q, double alpha, double beta, const Accuracy& acc = {});

// Beta(alpha, beta) log density at t, given t and 1 - t.
double beta_log_pdf(double t, double one_minus_t, double alpha, double beta);

double std_normal_cdf(double z);
double std_normal_sf(double z);
double std_normal_log_pdf(double z);
double std_normal_quantile(double p);

}  // namespace betaf::specfun
