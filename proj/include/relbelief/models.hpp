#pragma once

// Built-in model/prior/interest bundles. The continuous builtins take the
// interest to be the model parameter itself; the finite model carries an
// arbitrary map theta -> psi and is small enough to enumerate exhaustively.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "relbelief/random.hpp"

namespace relbelief {

// Observed data: a raw sample, the sufficient statistic directly, or (for
// finite models) the label of the observed outcome.
struct Sample {
  std::vector<double> values;
};
struct Statistic {
  double value = 0.0;
};
struct Outcome {
  std::string label;
};
using Data = std::variant<Sample, Statistic, Outcome>;

struct NormalParams {
  double mean = 0.0;
  double var = 1.0;
  double sd() const;
};

struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;
};

/// x_1..x_n iid N(mu, sigma0_sq), mu ~ N(mu_star, tau_star_sq).
struct LocationNormalSpec {
  std::int64_t n = 1;
  double sigma0_sq = 1.0;
  double mu_star = 0.0;
  double tau_star_sq = 1.0;

  void validate() const;
};

class LocationNormal {
 public:
  explicit LocationNormal(const LocationNormalSpec& spec);

  const LocationNormalSpec& spec() const noexcept { return spec_; }

  NormalParams prior() const;
  /// Conjugate posterior of mu given the sample mean.
  NormalParams posterior(double xbar) const;
  /// Distribution of xbar given mu.
  NormalParams sampling(double mu) const;
  /// Prior predictive of xbar: N(mu_star, tau_star_sq + sigma0_sq/n).
  NormalParams prior_predictive() const;

  /// Sample mean from either the raw sample (length n) or the statistic.
  double reduce(const Data& data) const;

  double prior_content(double lo, double hi) const;
  double posterior_content(double lo, double hi, double xbar) const;
  /// log of posterior density / prior density at psi.
  double log_rb_point(double xbar, double psi) const;
  double rb_cell(double xbar, double lo, double hi) const;

  double sample_prior(Philox4x32& rng) const;
  double sample_statistic(double mu, Philox4x32& rng) const;
  /// Raw data draw x_1..x_n given mu.
  std::vector<double> sample_data(double mu, Philox4x32& rng) const;

  bool in_support(double) const noexcept { return true; }
  /// Central `coverage` interval of the prior and of the posterior, merged.
  std::pair<double, double> default_range(std::optional<double> xbar,
                                          double coverage = 0.9999) const;
  std::string digest() const;

 private:
  LocationNormalSpec spec_;
};

/// s successes in n Bernoulli(theta) trials, theta ~ Beta(alpha, beta).
struct BetaBinomialSpec {
  std::int64_t n = 1;
  double alpha = 1.0;
  double beta = 1.0;

  void validate() const;
};

class BetaBinomial {
 public:
  explicit BetaBinomial(const BetaBinomialSpec& spec);

  const BetaBinomialSpec& spec() const noexcept { return spec_; }

  BetaParams prior() const;
  BetaParams posterior(double successes) const;
  /// Beta-binomial probability of s successes.
  double prior_predictive_pmf(std::int64_t s) const;

  /// Success count from a 0/1 sample of length n or the statistic.
  double reduce(const Data& data) const;

  double prior_content(double lo, double hi) const;
  double posterior_content(double lo, double hi, double successes) const;
  double log_rb_point(double successes, double psi) const;
  double rb_cell(double successes, double lo, double hi) const;

  double sample_prior(Philox4x32& rng) const;
  double sample_statistic(double theta, Philox4x32& rng) const;

  bool in_support(double psi) const noexcept { return psi > 0.0 && psi < 1.0; }
  std::pair<double, double> default_range(std::optional<double> successes,
                                          double coverage = 0.9999) const;
  std::string digest() const;

 private:
  BetaBinomialSpec spec_;
};

/// Finite parameter and data spaces. Likelihood rows are indexed by theta
/// and must each sum to one. When psi_labels is empty the interest is theta
/// itself. psi_values gives the numeric position of each psi (used for
/// distances and ordering); it defaults to 0, 1, 2, ...
struct FiniteModelSpec {
  std::vector<std::string> theta_labels;
  std::vector<double> prior;
  std::vector<std::string> x_labels;
  std::vector<std::vector<double>> likelihood;
  std::vector<std::string> psi_labels;
  std::vector<std::string> psi_of_theta;
  std::vector<double> psi_values;

  void validate() const;
};

class FiniteModel {
 public:
  explicit FiniteModel(FiniteModelSpec spec);

  const FiniteModelSpec& spec() const noexcept { return spec_; }
  std::size_t n_theta() const noexcept { return spec_.theta_labels.size(); }
  std::size_t n_x() const noexcept { return spec_.x_labels.size(); }
  std::size_t n_psi() const noexcept { return psi_labels_.size(); }

  const std::string& psi_label(std::size_t k) const { return psi_labels_.at(k); }
  double psi_value(std::size_t k) const { return psi_values_.at(k); }
  std::size_t psi_of_theta(std::size_t theta) const { return psi_index_of_theta_.at(theta); }
  std::size_t psi_index(const std::string& label) const;
  std::size_t x_index(const std::string& label) const;

  double prior_theta(std::size_t theta) const { return spec_.prior.at(theta); }
  double likelihood(std::size_t theta, std::size_t x) const { return spec_.likelihood.at(theta).at(x); }
  double prior_psi(std::size_t k) const { return prior_psi_.at(k); }
  /// Prior predictive M(x).
  double marginal(std::size_t x) const { return marginal_.at(x); }
  /// M(x | psi_k): data distribution averaged over the conditional prior.
  double conditional_predictive(std::size_t x, std::size_t k) const;
  double posterior_psi(std::size_t k, std::size_t x) const;
  double posterior_theta(std::size_t theta, std::size_t x) const;
  /// Pi(psi_k | x) / Pi(psi_k) as one quotient of sums.
  double rb_psi(std::size_t k, std::size_t x) const;
  double rb_theta(std::size_t theta, std::size_t x) const;
  double psi_distance(std::size_t k, std::size_t j) const;

  std::size_t reduce(const Data& data) const;
  std::string digest() const;

 private:
  FiniteModelSpec spec_;
  std::vector<std::string> psi_labels_;
  std::vector<double> psi_values_;
  std::vector<std::size_t> psi_index_of_theta_;
  std::vector<double> prior_psi_;
  std::vector<double> marginal_;
  // joint mass of {Psi = psi_k} x {x}
  std::vector<std::vector<double>> psi_joint_;
};

using InferenceBundle = std::variant<LocationNormal, BetaBinomial, FiniteModel>;

InferenceBundle make_location_normal(const LocationNormalSpec& spec);
InferenceBundle make_beta_binomial(std::int64_t n, double alpha, double beta);
InferenceBundle make_finite(FiniteModelSpec spec);

std::string bundle_digest(const InferenceBundle& bundle);

/// Partition of a psi interval into cells of width 2*delta. With an anchor
/// the cell [anchor - delta, anchor + delta] is one of the cells; edge cells
/// are clipped to the range.
struct Discretization {
  double delta = 0.0;
  std::optional<double> lo;
  std::optional<double> hi;
  std::optional<double> anchor;
};

struct Cell {
  double lo = 0.0;
  double hi = 0.0;
  double center = 0.0;
};

/// Range defaults (when disc.lo/hi are unset) come from the caller; the
/// range is widened to hold the whole anchor cell, then clipped to the
/// parameter support.
std::vector<Cell> make_cells(const Discretization& disc, double default_lo, double default_hi,
                             double support_lo = -std::numeric_limits<double>::infinity(),
                             double support_hi = std::numeric_limits<double>::infinity());

}  // namespace relbelief
