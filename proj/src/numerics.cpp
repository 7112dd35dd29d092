#include "relbelief/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "relbelief/errors.hpp"

namespace relbelief {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double std_normal_sf(double z) { return 0.5 * std::erfc(z * kInvSqrt2); }

double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal quantile needs p in (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double normal_log_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (d * d / var + std::log(2.0 * std::numbers::pi * var));
}

double normal_interval_prob(double lo, double hi, double mean, double sd) {
  if (!(hi > lo)) return 0.0;
  const double a = (lo - mean) / sd;
  const double b = (hi - mean) / sd;
  if (a >= 0.0) return std_normal_sf(a) - std_normal_sf(b);
  if (b <= 0.0) return std_normal_cdf(b) - std_normal_cdf(a);
  // straddles the mean: 1 - lower tail - upper tail
  return 1.0 - std_normal_cdf(a) - std_normal_sf(b);
}

QuadratureRule gauss_hermite_rule(std::size_t n_nodes) {
  if (n_nodes == 0) throw DomainError("quadrature needs at least one node");
  // Jacobi matrix of the probabilists' Hermite recurrence.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_nodes));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(n_nodes > 1 ? n_nodes - 1 : 0));
  for (Eigen::Index k = 0; k < sub.size(); ++k) sub[k] = std::sqrt(static_cast<double>(k + 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw DomainError("Gauss-Hermite eigen solve failed");

  QuadratureRule rule;
  rule.nodes.resize(n_nodes);
  rule.weights.resize(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    rule.nodes[i] = solver.eigenvalues()[idx];
    const double v0 = solver.eigenvectors()(0, idx);
    rule.weights[i] = v0 * v0;
  }
  return rule;
}

double gauss_hermite_expectation(const std::function<double(double)>& f,
                                 std::size_t n_nodes) {
  const QuadratureRule rule = gauss_hermite_rule(n_nodes);
  double sum = 0.0;
  for (std::size_t i = 0; i < n_nodes; ++i) sum += rule.weights[i] * f(rule.nodes[i]);
  return sum;
}

IntegralResult std_normal_expectation_piecewise(const std::function<double(double)>& f,
                                                std::span<const double> breakpoints,
                                                double tolerance, double z_max) {
  std::vector<double> edges{-z_max};
  for (double b : breakpoints)
    if (b > -z_max && b < z_max) edges.push_back(b);
  edges.push_back(z_max);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  auto integrand = [&](double z) { return f(z) * std_normal_pdf(z); };
  IntegralResult total;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double err = 0.0;
    total.value += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, edges[i], edges[i + 1], 15, tolerance, &err);
    // error is reported on the [-1, 1] reference interval
    total.error += 0.5 * err * (edges[i + 1] - edges[i]);
  }
  return total;
}

std::vector<double> bracketed_roots(const std::function<double(double)>& g, double lo,
                                    double hi, std::size_t n_scan) {
  std::vector<double> roots;
  double x0 = lo;
  double g0 = g(x0);
  for (std::size_t i = 1; i <= n_scan; ++i) {
    const double x1 = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_scan);
    const double g1 = g(x1);
    if (g0 == 0.0) {
      roots.push_back(x0);
    } else if (g0 * g1 < 0.0) {
      std::uintmax_t iters = 200;
      auto tol = boost::math::tools::eps_tolerance<double>(50);
      const auto [a, b] = boost::math::tools::toms748_solve(g, x0, x1, g0, g1, tol, iters);
      roots.push_back(0.5 * (a + b));
    }
    x0 = x1;
    g0 = g1;
  }
  return roots;
}

}  // namespace relbelief
