#include "relbelief/checking.hpp"

#include <cmath>

#include "relbelief/errors.hpp"
#include "relbelief/numerics.hpp"

namespace relbelief {

const char* to_string(ConflictVerdict v) noexcept {
  return v == ConflictVerdict::Conflict ? "conflict" : "no_conflict";
}

namespace {

constexpr double kTieTolerance = 1e-12;

bool in_tail(double mass, double observed) { return mass <= observed * (1.0 + kTieTolerance); }

double locnormal_tail(const LocationNormal& model, double xbar) {
  const auto pred = model.prior_predictive();
  return 2.0 * std_normal_sf(std::abs(xbar - pred.mean) / pred.sd());
}

double betabinomial_tail(const BetaBinomial& model, double s_obs) {
  const double observed = model.prior_predictive_pmf(static_cast<std::int64_t>(s_obs));
  double tail = 0.0;
  for (std::int64_t s = 0; s <= model.spec().n; ++s) {
    const double m = model.prior_predictive_pmf(s);
    if (in_tail(m, observed)) tail += m;
  }
  return std::min(tail, 1.0);
}

double finite_tail(const FiniteModel& model, std::size_t x_obs) {
  const double observed = model.marginal(x_obs);
  double tail = 0.0;
  for (std::size_t x = 0; x < model.n_x(); ++x)
    if (in_tail(model.marginal(x), observed)) tail += model.marginal(x);
  return std::min(tail, 1.0);
}

McEstimate locnormal_tail_mc(const LocationNormal& model, double xbar, const McConfig& mc) {
  const auto pred = model.prior_predictive();
  const double observed = normal_log_pdf(xbar, pred.mean, pred.var);
  return count_hits(mc, stream_tag("conflict_check"), [&](Philox4x32& rng) {
    const double t = model.sample_statistic(model.sample_prior(rng), rng);
    return normal_log_pdf(t, pred.mean, pred.var) <= observed;
  });
}

McEstimate betabinomial_tail_mc(const BetaBinomial& model, double s_obs, const McConfig& mc) {
  const double observed = model.prior_predictive_pmf(static_cast<std::int64_t>(s_obs));
  return count_hits(mc, stream_tag("conflict_check"), [&](Philox4x32& rng) {
    const double s = model.sample_statistic(model.sample_prior(rng), rng);
    return in_tail(model.prior_predictive_pmf(static_cast<std::int64_t>(s)), observed);
  });
}

}  // namespace

ConflictReport conflict_check(const InferenceBundle& bundle, const Data& data, const ConflictOptions& opts) {
  if (opts.factorization != Factorization::SingleFactor)
    throw DomainError("only the single-factor prior predictive check is supported; factor the model "
                      "into a finite model and check it by enumeration instead");
  if (!(opts.threshold > 0.0 && opts.threshold < 1.0))
    throw DomainError("conflict threshold must lie in (0,1)");

  ConflictReport rep;
  rep.threshold = opts.threshold;
  const bool mc = opts.method == Method::MonteCarlo;
  if (const auto* ln = std::get_if<LocationNormal>(&bundle)) {
    rep.t_obs = ln->reduce(data);
    if (mc) {
      const auto est = locnormal_tail_mc(*ln, rep.t_obs, opts.mc);
      rep.tail_prob = est.p();
      rep.se = est.se();
    } else {
      rep.tail_prob = locnormal_tail(*ln, rep.t_obs);
    }
  } else if (const auto* bb = std::get_if<BetaBinomial>(&bundle)) {
    rep.t_obs = bb->reduce(data);
    if (mc) {
      const auto est = betabinomial_tail_mc(*bb, rep.t_obs, opts.mc);
      rep.tail_prob = est.p();
      rep.se = est.se();
    } else {
      rep.tail_prob = betabinomial_tail(*bb, rep.t_obs);
    }
  } else {
    const auto& fm = std::get<FiniteModel>(bundle);
    const std::size_t x = fm.reduce(data);
    rep.t_obs = static_cast<double>(x);
    rep.t_label = fm.spec().x_labels[x];
    rep.tail_prob = finite_tail(fm, x);
  }
  rep.method = mc && !std::holds_alternative<FiniteModel>(bundle) ? Method::MonteCarlo : Method::Exact;
  rep.verdict = rep.tail_prob < rep.threshold ? ConflictVerdict::Conflict : ConflictVerdict::NoConflict;
  return rep;
}

}  // namespace relbelief
