#pragma once

// Prior-data conflict: how far out in its prior predictive distribution the
// observed minimal sufficient statistic lies.

#include <string>

#include "relbelief/bias.hpp"
#include "relbelief/models.hpp"
#include "relbelief/random.hpp"

namespace relbelief {

enum class ConflictVerdict { NoConflict, Conflict };
const char* to_string(ConflictVerdict v) noexcept;

/// How the prior predictive of the statistic is factored. Only the single
/// factor check is implemented.
enum class Factorization { SingleFactor, Hierarchical, Component };

struct ConflictOptions {
  double threshold = 0.05;
  Method method = Method::Auto;
  McConfig mc;
  Factorization factorization = Factorization::SingleFactor;
};

struct ConflictReport {
  double tail_prob = 1.0;
  double se = 0.0;
  double t_obs = 0.0;
  std::string t_label;  // observed outcome for finite models
  double threshold = 0.05;
  ConflictVerdict verdict = ConflictVerdict::NoConflict;
  Method method = Method::Exact;
};

/// M_T(m_T(t) <= m_T(T(x))) with m_T the prior predictive density (or mass)
/// of the sufficient statistic. Ties count in the tail; for discrete
/// statistics masses within a relative 1e-12 of the observed one are ties.
ConflictReport conflict_check(const InferenceBundle& bundle, const Data& data,
                              const ConflictOptions& opts = {});

}  // namespace relbelief
