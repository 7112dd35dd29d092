#include "relbelief/prob_core.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "relbelief/errors.hpp"

namespace relbelief {

Event Event::intersect(const Event& other) const {
  std::set<std::string> out;
  std::set_intersection(members_.begin(), members_.end(), other.members_.begin(),
                        other.members_.end(), std::inserter(out, out.end()));
  return Event(std::move(out));
}

Event Event::unite(const Event& other) const {
  std::set<std::string> out = members_;
  out.insert(other.members_.begin(), other.members_.end());
  return Event(std::move(out));
}

std::string Event::describe() const {
  std::string s = "{";
  for (auto it = members_.begin(); it != members_.end(); ++it) {
    if (it != members_.begin()) s += ", ";
    s += *it;
  }
  return s + "}";
}

FiniteProbSpace::FiniteProbSpace(std::vector<std::string> labels, std::vector<double> weights)
    : labels_(std::move(labels)), weights_(std::move(weights)) {
  if (labels_.size() != weights_.size())
    throw DomainError("probability space needs one weight per outcome");
  if (labels_.empty()) throw DomainError("probability space needs at least one outcome");
  double total = 0.0;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!(weights_[i] >= 0.0 && weights_[i] <= 1.0))
      throw DomainError("weight of outcome '" + labels_[i] + "' is not in [0,1]");
    if (!index_.emplace(labels_[i], i).second)
      throw DomainError("duplicate outcome label '" + labels_[i] + "'");
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("outcome weights do not sum to 1");
}

void FiniteProbSpace::check_members(const Event& e) const {
  for (const auto& m : e.members())
    if (!index_.count(m)) throw DomainError("event label '" + m + "' is not an outcome");
}

double FiniteProbSpace::prob(const Event& e) const {
  check_members(e);
  // Sum in outcome order so equal events give bit-identical probabilities.
  double p = 0.0;
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (e.contains(labels_[i])) p += weights_[i];
  return p;
}

Event FiniteProbSpace::complement(const Event& e) const {
  check_members(e);
  std::set<std::string> out;
  for (const auto& l : labels_)
    if (!e.contains(l)) out.insert(l);
  return Event(std::move(out));
}

Event FiniteProbSpace::universe() const {
  return Event(std::set<std::string>(labels_.begin(), labels_.end()));
}

EvidenceVerdict verdict_from_rb(double rb) noexcept {
  if (rb > 1.0) return {VerdictKind::Favor, rb};
  if (rb < 1.0) return {VerdictKind::Against, rb};
  return {VerdictKind::Neutral, rb};
}

const char* to_string(VerdictKind kind) noexcept {
  switch (kind) {
    case VerdictKind::Favor: return "favor";
    case VerdictKind::Against: return "against";
    case VerdictKind::Neutral: return "neutral";
  }
  return "unknown";
}

double rb_event(const FiniteProbSpace& space, const Event& a, const Event& c) {
  const double pa = space.prob(a);
  const double pc = space.prob(c);
  if (!(pa > 0.0)) throw DomainError("target event " + a.describe() + " has probability 0");
  if (!(pc > 0.0)) throw DomainError("conditioning event " + c.describe() + " has probability 0");
  return space.prob(a.intersect(c)) / (pa * pc);
}

double bayes_factor_event(const FiniteProbSpace& space, const Event& a, const Event& c) {
  const double pa = space.prob(a);
  if (!(pa > 0.0 && pa < 1.0))
    throw DomainError("Bayes factor needs 0 < P(" + a.describe() + ") < 1");
  return rb_event(space, a, c) / rb_event(space, space.complement(a), c);
}

UnionAnalysis union_incoherence(const FiniteProbSpace& space, const Event& a, const Event& b,
                                const Event& c) {
  if (!a.intersect(b).empty())
    throw DomainError("events " + a.describe() + " and " + b.describe() + " overlap");
  UnionAnalysis out;
  const Event ab = a.unite(b);
  out.rb_a = rb_event(space, a, c);
  out.rb_b = rb_event(space, b, c);
  out.rb_union = rb_event(space, ab, c);
  const double p_ab = space.prob(ab);
  out.p_a_given_union = space.prob(a) / p_ab;
  const double p_b_given_union = space.prob(b) / p_ab;
  if (out.rb_a != out.rb_b) out.threshold = (1.0 - out.rb_b) / (out.rb_a - out.rb_b);
  const double averaged = out.rb_a * out.p_a_given_union + out.rb_b * p_b_given_union;
  out.decomposition_holds =
      std::abs(out.rb_union - averaged) <= 1e-12 * std::max(1.0, std::abs(out.rb_union));
  out.incoherent = out.rb_a > 1.0 && out.rb_union < 1.0;
  return out;
}

}  // namespace relbelief
