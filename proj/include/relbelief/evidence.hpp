#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "relbelief/models.hpp"
#include "relbelief/prob_core.hpp"

namespace relbelief {

// Cells with prior content below this are excluded from inference.
inline constexpr double kMinCellPrior = 1e-12;

struct ProfileCell {
  double lo = 0.0;
  double hi = 0.0;
  double center = 0.0;
  // psi label for finite models, empty for interval cells
  std::string label;
  double prior = 0.0;
  double posterior = 0.0;
  double rb = 0.0;
  bool usable = true;
};

/// Cellwise relative belief for one observed data set.
struct EvidenceProfile {
  std::vector<ProfileCell> cells;
  std::int64_t n = 0;
  double t_obs = 0.0;
  std::string bundle_digest;
  bool categorical = false;
  std::vector<std::size_t> unusable;

  /// Cell holding psi (interval cells) or named psi (finite models).
  std::size_t locate(double psi) const;
  std::size_t locate(const std::string& label) const;

  double prior_total() const;
  double posterior_total() const;
};

using PsiValue = std::variant<double, std::string>;

EvidenceProfile rb_profile(const InferenceBundle& bundle, const Data& data,
                           const std::optional<Discretization>& disc);

struct CredibleRegion {
  double gamma = 0.0;
  double cutoff = 0.0;
  std::vector<std::size_t> cells;
  double posterior_content = 0.0;
  double prior_content = 0.0;
  /// RB of the region as an event.
  double rb() const { return posterior_content / prior_content; }
};

struct EstimateReport {
  std::size_t psi_hat_cell = 0;
  double psi_hat = 0.0;
  std::string psi_hat_label;
  double max_rb = 0.0;
  std::vector<std::size_t> tied_cells;
  std::vector<std::size_t> plausible_region;
  double pl_posterior_content = 0.0;
  double pl_prior_content = 0.0;
  std::optional<CredibleRegion> credible;
};

/// Relative belief estimate, plausible region, and (for gamma) the
/// gamma-credible region {rb >= c}, c = inf{c : Pi(rb > c | x) < gamma}.
EstimateReport estimate(const EvidenceProfile& profile, std::optional<double> gamma = {});

CredibleRegion credible_region(const EvidenceProfile& profile, double gamma);

/// Posterior content of cells with rb <= rb of the given cell.
double strength(const EvidenceProfile& profile, std::size_t cell);
double strength(const EvidenceProfile& profile, const PsiValue& psi0);
// keeps a numeric psi from converting to a cell index
double strength(const EvidenceProfile& profile, double psi0);

struct HypothesisAssessment {
  PsiValue psi0;
  std::size_t cell = 0;
  double rb0 = 0.0;
  double strength = 0.0;
  EvidenceVerdict verdict;
  double markov_lower = 0.0;
  double markov_upper = 0.0;
};

HypothesisAssessment assess(const EvidenceProfile& profile, const PsiValue& psi0);

/// Closed-form RB(mu0 | x) for the location-normal model.
double rb_locnormal_exact(const LocationNormalSpec& spec, double xbar, double mu0);

/// Difference of the classical two-sided p-value and the tail probability
/// at the RB = 1 boundary; positive exactly when RB(mu0 | x) > 1.
double tail_difference_locnormal(const LocationNormalSpec& spec, double xbar, double mu0);

/// Maps cells through a strictly monotone lambda; rb values are unchanged.
EvidenceProfile reparam_profile(const EvidenceProfile& profile,
                                const std::function<double(double)>& lambda);

}  // namespace relbelief
