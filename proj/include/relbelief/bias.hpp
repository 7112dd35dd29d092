#pragma once

// A priori bias of relative belief inferences: for a hypothesis psi0, the
// prior probability of evidence against it when it is true and of evidence
// in favor of it when psi is meaningfully different; for estimation, the
// same quantities averaged over (or maximized over) the prior on psi.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "relbelief/errors.hpp"
#include "relbelief/evidence.hpp"
#include "relbelief/models.hpp"
#include "relbelief/random.hpp"

namespace relbelief {

enum class Method { Auto, Exact, MonteCarlo };
const char* to_string(Method m) noexcept;

struct BiasOptions {
  Method method = Method::Auto;
  McConfig mc;
  /// When set, the hypothesis is the cell [psi0 - h, psi0 + h] and RB is the
  /// cell ratio; otherwise RB is the point (density-ratio) value.
  std::optional<double> cell_half_width;
  /// Take the sup for bias in favor over {psi0 +/- delta} only; when false a
  /// grid over {dist >= delta} is searched.
  bool monotone_boundary = true;
  /// Candidate psi values for the non-monotone sup (defaults to a dense grid).
  std::vector<double> sup_grid;
  /// Relative change allowed between quadrature refinements before
  /// falling back to Monte Carlo.
  double quadrature_tolerance = 1e-6;
  /// Gauss-Hermite nodes for the prior average (compared against twice as many).
  std::size_t hermite_nodes = 64;
};

/// A probability with its Monte Carlo standard error (0 when exact).
struct ProbEstimate {
  double value = 0.0;
  double se = 0.0;
};

struct BiasHReport {
  PsiValue psi0;
  double delta = 0.0;
  double bias_against = 0.0;
  double se_against = 0.0;
  double bias_in_favor = 0.0;
  double se_in_favor = 0.0;
  // psi attaining the sup in the bias in favor (nullopt if no psi qualifies)
  std::optional<PsiValue> favor_argsup;
  Method method = Method::Exact;
};

struct BiasEReport {
  double avg_bias_against = 0.0;
  double se_avg_against = 0.0;
  double sup_bias_against = 0.0;
  double se_sup_against = 0.0;
  PsiValue sup_location = 0.0;
  double avg_bias_in_favor = 0.0;
  double se_avg_in_favor = 0.0;
  double implied_coverage = 0.0;
  double delta = 0.0;
  Method method = Method::Exact;
  bool fallback = false;
  std::vector<std::string> warnings;
};

/// M(RB(mu0 | X) >= 1 | mu_true) for the location-normal model, exact.
double favor_prob_locnormal(const LocationNormalSpec& spec, double mu0, double mu_true);

/// Same event for the cell hypothesis [mu0 - h, mu0 + h] with the cell ratio.
double favor_prob_locnormal_cell(const LocationNormalSpec& spec, double mu0, double half_width,
                                 double mu_true);

/// M(RB(psi0|X) <= 1 | psi_true) or M(RB(psi0|X) >= 1 | psi_true) by
/// enumeration over the finite data space.
double against_prob_finite(const FiniteModel& model, std::size_t psi0, std::size_t psi_true);
double favor_prob_finite(const FiniteModel& model, std::size_t psi0, std::size_t psi_true);

/// M(RB(psi0 | X) <= 1 | psi0).
ProbEstimate bias_against_h(const InferenceBundle& bundle, const PsiValue& psi0,
                            const BiasOptions& opts = {});

/// sup over {psi : dist(psi, psi0) >= delta} of M(RB(psi0 | X) >= 1 | psi).
/// Returns the value and the maximizing psi.
std::pair<ProbEstimate, std::optional<PsiValue>> bias_in_favor_h(const InferenceBundle& bundle,
                                                                 const PsiValue& psi0, double delta,
                                                                 const BiasOptions& opts = {});

BiasHReport bias_h(const InferenceBundle& bundle, const PsiValue& psi0, double delta,
                   const BiasOptions& opts = {});

/// Average (over the prior) and supremum of M(RB(psi | X) <= 1 | psi).
BiasEReport bias_against_e(const InferenceBundle& bundle, const BiasOptions& opts = {});

/// Prior average over psi0 of the bias in favor of psi0.
BiasEReport bias_in_favor_e(const InferenceBundle& bundle, double delta, const BiasOptions& opts = {});

/// Both estimation functionals in one report.
BiasEReport bias_e(const InferenceBundle& bundle, double delta, const BiasOptions& opts = {});

struct DesignTargets {
  std::optional<double> max_bias_against;
  std::optional<double> max_bias_in_favor;
};

struct DesignRow {
  std::int64_t n = 0;
  BiasHReport report;
  bool admissible = false;
};

struct DesignResult {
  std::int64_t n = 0;
  std::vector<DesignRow> table;
};

/// Raised when no sample size on the grid meets the targets; carries every
/// evaluated row.
class DesignError : public DomainError {
 public:
  DesignError(const std::string& what, std::vector<DesignRow> table)
      : DomainError(what), table_(std::move(table)) {}
  const std::vector<DesignRow>& table() const noexcept { return table_; }

 private:
  std::vector<DesignRow> table_;
};

/// Smallest n on the ascending grid whose hypothesis biases meet every
/// given target.
DesignResult design_sample_size(const std::function<InferenceBundle(std::int64_t)>& family,
                                const PsiValue& psi0, double delta, const DesignTargets& targets,
                                const std::vector<std::int64_t>& n_grid, const BiasOptions& opts = {});

}  // namespace relbelief
