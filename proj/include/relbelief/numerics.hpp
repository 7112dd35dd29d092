#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace relbelief {

/// Standard normal CDF, computed from erfc so both tails keep full
/// relative precision.
double std_normal_cdf(double z);
/// Upper tail 1 - Phi(z).
double std_normal_sf(double z);
double std_normal_pdf(double z);
double std_normal_quantile(double p);

double normal_log_pdf(double x, double mean, double var);

/// P(lo <= X <= hi) for X ~ N(mean, sd^2); evaluates on whichever side of
/// the mean avoids cancellation.
double normal_interval_prob(double lo, double hi, double mean, double sd);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for E[f(Z)], Z ~ N(0,1); weights sum to one.
/// Built by the Golub-Welsch eigenvalue method.
QuadratureRule gauss_hermite_rule(std::size_t n_nodes);

double gauss_hermite_expectation(const std::function<double(double)>& f,
                                 std::size_t n_nodes);

struct IntegralResult {
  double value = 0.0;
  double error = 0.0;
};

/// E[f(Z)] for Z ~ N(0,1) by adaptive Gauss-Kronrod over [-z_max, z_max],
/// split at the given breakpoints so kinks of f land on panel edges.
IntegralResult std_normal_expectation_piecewise(
    const std::function<double(double)>& f, std::span<const double> breakpoints,
    double tolerance = 1e-11, double z_max = 12.0);

/// Roots of g on [lo, hi] detected by a sign scan of n_scan intervals and
/// refined by bracketing.
std::vector<double> bracketed_roots(const std::function<double(double)>& g,
                                    double lo, double hi, std::size_t n_scan);

}  // namespace relbelief
