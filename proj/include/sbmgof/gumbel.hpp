#pragma once

#include <span>

namespace sbmgof {

/// Location/scale of a Type-I extreme value (Gumbel) distribution.
struct GumbelParams {
    double mu = 0.0;
    double beta = 1.0;
};

// The null law of the test statistic: Gumbel with mu = -log(pi), beta = 2,
// i.e. CDF exp(-e^{-x/2} / sqrt(pi)).
GumbelParams null_gumbel_params();

// exp(-e^{-x/2} / sqrt(pi))
double gumbel_cdf(double x);

// (1-alpha)-quantile of the null law: -2 log(-sqrt(pi) log(1-alpha)).
// Requires alpha in (0, 1).
double critical_value(double alpha);

// 1 - gumbel_cdf(theta)
double p_value(double theta);

// Inverse CDF of Gumbel(params) at u in (0, 1).
double gumbel_quantile(double u, const GumbelParams& params);

// Maximum likelihood fit of location and scale. Requires at least 10 samples
// with positive variance. beta solves the profile equation
//   beta = mean(x) - sum(x e^{-x/beta}) / sum(e^{-x/beta})
// by a bracketed bisection/Newton hybrid (start: method of moments, tolerance
// 1e-8, at most 200 iterations); mu follows in closed form. The sample is
// sorted internally so the fit is invariant under permutation of the input.
GumbelParams fit_gumbel_mle(std::span<const double> samples);

// Log-likelihood of samples under Gumbel(params); used by tests.
double gumbel_log_likelihood(std::span<const double> samples, const GumbelParams& params);

} // namespace sbmgof
