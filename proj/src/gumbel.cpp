#include "sbmgof/gumbel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbmgof {

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

struct ProfileEval {
    double h;      // beta-profile residual: mean(x) - weighted_mean - beta
    double dh;     // derivative in beta (always negative)
};

// Weights are computed against the sample minimum so nothing overflows.
ProfileEval eval_profile(const std::vector<double>& x, double beta) {
    const double x_min = x.front(); // sorted ascending
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, sum = 0.0;
    for (double xi : x) {
        const double w = std::exp(-(xi - x_min) / beta);
        s0 += w;
        s1 += xi * w;
        s2 += xi * xi * w;
        sum += xi;
    }
    const double n = static_cast<double>(x.size());
    const double wmean = s1 / s0;
    const double wvar = s2 / s0 - wmean * wmean;
    return {sum / n - wmean - beta, -wvar / (beta * beta) - 1.0};
}

} // namespace

GumbelParams null_gumbel_params() { return {-std::log(std::numbers::pi), 2.0}; }

double gumbel_cdf(double x) { return std::exp(-std::exp(-x / 2.0) / kSqrtPi); }

double critical_value(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0, 1)");
    return -2.0 * std::log(-kSqrtPi * std::log1p(-alpha));
}

double p_value(double theta) { return -std::expm1(-std::exp(-theta / 2.0) / kSqrtPi); }

double gumbel_quantile(double u, const GumbelParams& params) {
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("quantile level must lie in (0, 1)");
    return params.mu - params.beta * std::log(-std::log(u));
}

GumbelParams fit_gumbel_mle(std::span<const double> samples) {
    if (samples.size() < 10)
        throw std::invalid_argument("gumbel fit needs at least 10 samples, got " +
                                    std::to_string(samples.size()));
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());

    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double xi : x) mean += xi;
    mean /= n;
    double var = 0.0;
    for (double xi : x) var += (xi - mean) * (xi - mean);
    var /= n;
    if (!(var > 0.0)) throw std::invalid_argument("degenerate sample: zero variance");

    const double scale = std::max(1.0, std::abs(mean) + std::sqrt(var));
    const double h_tol = 1e-10 * scale;

    // method-of-moments start, then bracket the unique root of the profile
    double beta = std::sqrt(6.0 * var) / std::numbers::pi;
    double lo = beta, hi = beta;
    if (eval_profile(x, beta).h > 0.0) {
        for (int i = 0; i < 200 && eval_profile(x, hi).h > 0.0; ++i) hi *= 2.0;
    } else {
        for (int i = 0; i < 200 && eval_profile(x, lo).h <= 0.0; ++i) lo *= 0.5;
    }

    ProfileEval e{};
    bool converged = false;
    for (int iter = 0; iter < 200; ++iter) {
        e = eval_profile(x, beta);
        if (std::abs(e.h) < h_tol || (hi - lo) < 1e-12 * beta) {
            converged = true;
            break;
        }
        if (e.h > 0.0)
            lo = beta;
        else
            hi = beta;
        double next = beta - e.h / e.dh;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        beta = next;
    }
    if (!converged)
        throw std::runtime_error("gumbel MLE did not converge; residual " + std::to_string(e.h));

    const double x_min = x.front();
    double acc = 0.0;
    for (double xi : x) acc += std::exp(-(xi - x_min) / beta);
    const double mu = x_min - beta * std::log(acc / n);
    return {mu, beta};
}

double gumbel_log_likelihood(std::span<const double> samples, const GumbelParams& params) {
    if (!(params.beta > 0.0)) throw std::invalid_argument("beta must be positive");
    double ll = 0.0;
    for (double xi : samples) {
        const double z = (xi - params.mu) / params.beta;
        ll += -std::log(params.beta) - z - std::exp(-z);
    }
    return ll;
}

} // namespace sbmgof
