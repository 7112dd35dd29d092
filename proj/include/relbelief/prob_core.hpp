#pragma once

// Evidence calculus on finite probability spaces: relative belief ratios and
// Bayes factors for events, and the decomposition of the ratio of a disjoint
// union into the ratios of its parts.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace relbelief {

/// A set of outcome labels. Membership in a particular space is checked
/// when the event is evaluated against it.
class Event {
 public:
  Event() = default;
  Event(std::initializer_list<std::string> labels) : members_(labels) {}
  explicit Event(std::set<std::string> labels) : members_(std::move(labels)) {}

  const std::set<std::string>& members() const noexcept { return members_; }
  bool contains(const std::string& label) const { return members_.count(label) > 0; }
  bool empty() const noexcept { return members_.empty(); }

  Event intersect(const Event& other) const;
  Event unite(const Event& other) const;

  /// Comma-separated labels, for error messages.
  std::string describe() const;

  friend bool operator==(const Event&, const Event&) = default;

 private:
  std::set<std::string> members_;
};

class FiniteProbSpace {
 public:
  /// Labels must be unique and weights a probability vector (sum 1 within
  /// 1e-12, all nonnegative).
  FiniteProbSpace(std::vector<std::string> labels, std::vector<double> weights);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  double prob(const Event& e) const;
  Event complement(const Event& e) const;
  Event universe() const;

 private:
  void check_members(const Event& e) const;

  std::vector<std::string> labels_;
  std::vector<double> weights_;
  std::map<std::string, std::size_t> index_;
};

enum class VerdictKind { Favor, Against, Neutral };

struct EvidenceVerdict {
  VerdictKind kind = VerdictKind::Neutral;
  double rb = 1.0;
};

/// Favor iff rb > 1, Against iff rb < 1; an exact 1 is Neutral.
EvidenceVerdict verdict_from_rb(double rb) noexcept;
const char* to_string(VerdictKind kind) noexcept;

/// RB(a | c) = P(a | c) / P(a), evaluated as P(a n c) / (P(a) P(c)).
double rb_event(const FiniteProbSpace& space, const Event& a, const Event& c);

/// BF(a | c) = RB(a | c) / RB(a^c | c); needs 0 < P(a) < 1.
double bayes_factor_event(const FiniteProbSpace& space, const Event& a, const Event& c);

struct UnionAnalysis {
  double rb_union = 0.0;
  double rb_a = 0.0;
  double rb_b = 0.0;
  double p_a_given_union = 0.0;
  // (1 - rb_b) / (rb_a - rb_b); absent when rb_a == rb_b
  std::optional<double> threshold;
  bool decomposition_holds = false;
  // evidence for a but against a u b
  bool incoherent = false;
};

/// Disjoint a, b: RB(a u b | c) = RB(a|c) P(a | a u b) + RB(b|c) P(b | a u b).
UnionAnalysis union_incoherence(const FiniteProbSpace& space, const Event& a, const Event& b,
                                const Event& c);

}  // namespace relbelief
