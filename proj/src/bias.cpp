#include "relbelief/bias.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "relbelief/errors.hpp"
#include "relbelief/numerics.hpp"

namespace relbelief {

const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::Auto: return "auto";
    case Method::Exact: return "exact";
    case Method::MonteCarlo: return "monte_carlo";
  }
  return "unknown";
}

namespace {

constexpr std::size_t kSupGridPoints = 161;
constexpr std::size_t kMcSupGridPoints = 41;
constexpr std::size_t kDenseFavorPoints = 201;

enum class Side { Against, Favor };

double as_number(const PsiValue& psi) {
  if (const auto* v = std::get_if<double>(&psi)) return *v;
  const auto& s = std::get<std::string>(psi);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw DomainError("psi0 '" + s + "' is not a number");
  return v;
}

std::size_t finite_psi(const FiniteModel& model, const PsiValue& psi) {
  if (const auto* s = std::get_if<std::string>(&psi)) return model.psi_index(*s);
  const double v = std::get<double>(psi);
  for (std::size_t k = 0; k < model.n_psi(); ++k)
    if (model.psi_value(k) == v) return k;
  throw DomainError("no psi value equals " + std::to_string(v));
}

// ---------------------------------------------------------------------------
// location normal, exact

struct LocNormalFavorWindow {
  double r = 0.0;      // half-width in z
  double d = 0.0;      // offset from prior mean
};

// log RB(mu0|x) >= 0  <=>  |z + d| <= r,  z = sqrt(n)(xbar - mu0)/sigma0.
LocNormalFavorWindow favor_window(const LocationNormalSpec& spec, double mu0) {
  const double n = static_cast<double>(spec.n);
  const double sigma0 = std::sqrt(spec.sigma0_sq);
  const double shrink = 1.0 / (1.0 + spec.sigma0_sq / (n * spec.tau_star_sq));
  const double d = sigma0 * (spec.mu_star - mu0) / (std::sqrt(n) * spec.tau_star_sq);
  const double r2 = (std::log1p(n * spec.tau_star_sq / spec.sigma0_sq) +
                     (mu0 - spec.mu_star) * (mu0 - spec.mu_star) / spec.tau_star_sq) /
                    shrink;
  if (!(r2 > 0.0)) throw DomainError("internal: nonpositive favor window radius");
  return {std::sqrt(r2), d};
}

double locnormal_prob(const LocationNormal& model, double psi0, double psi_true, Side side,
                      const std::optional<double>& cell) {
  const double favor = cell ? favor_prob_locnormal_cell(model.spec(), psi0, *cell, psi_true)
                            : favor_prob_locnormal(model.spec(), psi0, psi_true);
  return side == Side::Favor ? favor : 1.0 - favor;
}

// ---------------------------------------------------------------------------
// beta-binomial, exact by summing over the success count

double betabinomial_prob(const BetaBinomial& model, double psi0, double psi_true, Side side,
                         const std::optional<double>& cell) {
  if (!model.in_support(psi0)) throw DomainError("beta-binomial psi0 must lie in (0,1)");
  if (!(psi_true >= 0.0 && psi_true <= 1.0)) throw DomainError("beta-binomial psi must lie in [0,1]");
  const auto n = model.spec().n;
  boost::math::binomial_distribution<double> bin(static_cast<double>(n), psi_true);
  double p = 0.0;
  for (std::int64_t s = 0; s <= n; ++s) {
    const double sd = static_cast<double>(s);
    bool hit;
    if (cell) {
      const double rb = model.rb_cell(sd, psi0 - *cell, psi0 + *cell);
      hit = side == Side::Favor ? rb >= 1.0 : rb <= 1.0;
    } else {
      const double lrb = model.log_rb_point(sd, psi0);
      hit = side == Side::Favor ? lrb >= 0.0 : lrb <= 0.0;
    }
    if (hit) p += boost::math::pdf(bin, sd);
  }
  return std::min(p, 1.0);
}

// ---------------------------------------------------------------------------
// Monte Carlo for the continuous builtins

template <class Model>
bool evidence_event(const Model& model, double t, double psi0, Side side,
                    const std::optional<double>& cell) {
  if (cell) {
    const double rb = model.rb_cell(t, psi0 - *cell, psi0 + *cell);
    return side == Side::Favor ? rb >= 1.0 : rb <= 1.0;
  }
  const double lrb = model.log_rb_point(t, psi0);
  return side == Side::Favor ? lrb >= 0.0 : lrb <= 0.0;
}

template <class Model>
McEstimate mc_prob(const Model& model, double psi0, double psi_true, Side side,
                   const std::optional<double>& cell, const McConfig& mc, std::uint64_t tag) {
  return count_hits(mc, tag, [&](Philox4x32& rng) {
    const double t = model.sample_statistic(psi_true, rng);
    return evidence_event(model, t, psi0, side, cell);
  });
}

template <class Model>
double exact_prob(const Model& model, double psi0, double psi_true, Side side,
                  const std::optional<double>& cell) {
  if constexpr (std::is_same_v<Model, LocationNormal>)
    return locnormal_prob(model, psi0, psi_true, side, cell);
  else
    return betabinomial_prob(model, psi0, psi_true, side, cell);
}

template <class Model>
std::vector<double> favor_candidates(const Model& model, double psi0, double delta,
                                     const BiasOptions& opts) {
  std::vector<double> out;
  if (opts.monotone_boundary) {
    for (double c : {psi0 - delta, psi0 + delta})
      if (model.in_support(c)) out.push_back(c);
    return out;
  }
  if (!opts.sup_grid.empty()) {
    for (double c : opts.sup_grid)
      if (std::abs(c - psi0) >= delta && model.in_support(c)) out.push_back(c);
    return out;
  }
  if constexpr (std::is_same_v<Model, LocationNormal>) {
    const double span = 8.0 * std::sqrt(model.spec().tau_star_sq);
    for (std::size_t k = 0; k <= kDenseFavorPoints; ++k) {
      const double off = delta + span * static_cast<double>(k) / kDenseFavorPoints;
      out.push_back(psi0 - off);
      out.push_back(psi0 + off);
    }
  } else {
    for (std::size_t k = 1; k < 2 * kDenseFavorPoints; ++k) {
      const double c = static_cast<double>(k) / (2 * kDenseFavorPoints);
      if (std::abs(c - psi0) >= delta) out.push_back(c);
    }
  }
  return out;
}

Method resolve(Method requested) { return requested == Method::Auto ? Method::Exact : requested; }

template <class Model>
std::pair<ProbEstimate, std::optional<PsiValue>> continuous_favor_h(const Model& model, double psi0,
                                                                    double delta, const BiasOptions& opts) {
  const auto candidates = favor_candidates(model, psi0, delta, opts);
  if (candidates.empty()) return {ProbEstimate{}, std::nullopt};
  const Method method = resolve(opts.method);
  ProbEstimate best{-1.0, 0.0};
  double arg = candidates.front();
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    ProbEstimate est;
    if (method == Method::Exact) {
      est.value = exact_prob(model, psi0, candidates[j], Side::Favor, opts.cell_half_width);
    } else {
      const auto m = mc_prob(model, psi0, candidates[j], Side::Favor, opts.cell_half_width, opts.mc,
                             stream_tag("bias_in_favor_h") + j);
      est = {m.p(), m.se()};
    }
    if (est.value > best.value) {
      best = est;
      arg = candidates[j];
    }
  }
  return {best, PsiValue{arg}};
}

// ---------------------------------------------------------------------------
// estimation functionals

template <class Model>
std::pair<double, double> mc_psi_range(const Model& model) {
  if constexpr (std::is_same_v<Model, LocationNormal>) {
    const double tau = std::sqrt(model.spec().tau_star_sq);
    return {model.spec().mu_star - 4.0 * tau, model.spec().mu_star + 4.0 * tau};
  } else {
    return {0.01, 0.99};
  }
}

template <class Model>
ProbEstimate mc_avg_against(const Model& model, const BiasOptions& opts) {
  const auto m = count_hits(opts.mc, stream_tag("avg_bias_against"), [&](Philox4x32& rng) {
    const double psi = model.sample_prior(rng);
    if (!model.in_support(psi)) return true;  // boundary draw: no evidence for psi
    const double t = model.sample_statistic(psi, rng);
    return evidence_event(model, t, psi, Side::Against, opts.cell_half_width);
  });
  return {m.p(), m.se()};
}

template <class Model>
std::pair<ProbEstimate, double> mc_sup_against(const Model& model, const BiasOptions& opts) {
  const auto [lo, hi] = mc_psi_range(model);
  ProbEstimate best{-1.0, 0.0};
  double where = lo;
  for (std::size_t k = 0; k < kMcSupGridPoints; ++k) {
    const double psi = lo + (hi - lo) * static_cast<double>(k) / (kMcSupGridPoints - 1);
    const auto m = mc_prob(model, psi, psi, Side::Against, opts.cell_half_width, opts.mc,
                           stream_tag("sup_bias_against") + k);
    if (m.p() > best.value) {
      best = {m.p(), m.se()};
      where = psi;
    }
  }
  return {best, where};
}

template <class Model>
ProbEstimate mc_avg_favor(const Model& model, double delta, const BiasOptions& opts) {
  const std::uint64_t n_outer = opts.mc.n_outer;
  std::vector<double> per_draw(n_outer, 0.0);
  McConfig inner = opts.mc;
  inner.threads = 1;
  const std::uint64_t tag_outer = stream_tag("avg_bias_in_favor.outer");
  const std::uint64_t tag_inner = stream_tag("avg_bias_in_favor.inner");
  parallel_for_index(n_outer, opts.mc.threads, [&](std::uint64_t i) {
    Philox4x32 rng = substream(opts.mc.seed, tag_outer, i);
    const double psi0 = model.sample_prior(rng);
    if (!model.in_support(psi0)) return;
    const auto candidates = favor_candidates(model, psi0, delta, opts);
    double best = 0.0;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      const auto m = mc_prob(model, psi0, candidates[j], Side::Favor, opts.cell_half_width, inner,
                             tag_inner + i * 1000003ULL + j);
      best = std::max(best, m.p());
    }
    per_draw[i] = best;
  });
  double sum = 0.0, sum_sq = 0.0;
  for (double v : per_draw) {
    sum += v;
    sum_sq += v * v;
  }
  const double nn = static_cast<double>(n_outer);
  const double mean = sum / nn;
  const double var = n_outer > 1 ? std::max(0.0, (sum_sq - nn * mean * mean) / (nn - 1.0)) : 0.0;
  return {mean, std::sqrt(var / nn)};
}

bool converged(double coarse, double fine, double tol) {
  return std::abs(fine - coarse) <= tol * std::abs(fine) + 1e-14;
}

void locnormal_against_e(const LocationNormal& model, const BiasOptions& opts, BiasEReport& rep) {
  const double mu_star = model.spec().mu_star;
  const double tau = std::sqrt(model.spec().tau_star_sq);
  auto against_at = [&](double psi) {
    return locnormal_prob(model, psi, psi, Side::Against, opts.cell_half_width);
  };
  auto integrand = [&](double z) { return against_at(mu_star + tau * z); };
  if (opts.hermite_nodes < 1) throw DomainError("hermite_nodes must be at least 1");
  const double coarse = gauss_hermite_expectation(integrand, opts.hermite_nodes);
  const double fine = gauss_hermite_expectation(integrand, 2 * opts.hermite_nodes);
  if (converged(coarse, fine, opts.quadrature_tolerance)) {
    rep.avg_bias_against = fine;
  } else {
    rep.fallback = true;
    rep.warnings.push_back("average bias against: Gauss-Hermite refinement changed the value by more "
                           "than the tolerance; using Monte Carlo");
    const auto mc = mc_avg_against(model, opts);
    rep.avg_bias_against = mc.value;
    rep.se_avg_against = mc.se;
  }

  // Grid search over mu* +/- 4 tau (which contains mu*), then Brent refinement.
  const double lo = mu_star - 4.0 * tau;
  const double hi = mu_star + 4.0 * tau;
  const double step = (hi - lo) / (kSupGridPoints - 1);
  double best_psi = mu_star;
  double best = against_at(mu_star);
  for (std::size_t k = 0; k < kSupGridPoints; ++k) {
    const double psi = lo + step * static_cast<double>(k);
    const double v = against_at(psi);
    if (v > best) {
      best = v;
      best_psi = psi;
    }
  }
  const auto refined = boost::math::tools::brent_find_minima(
      [&](double psi) { return -against_at(psi); }, best_psi - step, best_psi + step, 52);
  if (-refined.second > best) {
    best = -refined.second;
    best_psi = refined.first;
  }
  rep.sup_bias_against = best;
  rep.sup_location = best_psi;
}

void locnormal_favor_e(const LocationNormal& model, double delta, const BiasOptions& opts,
                       BiasEReport& rep) {
  const double mu_star = model.spec().mu_star;
  const double tau = std::sqrt(model.spec().tau_star_sq);
  auto sup_at = [&](double psi0) {
    double best = 0.0;
    for (double c : favor_candidates(model, psi0, delta, opts))
      best = std::max(best, locnormal_prob(model, psi0, c, Side::Favor, opts.cell_half_width));
    return best;
  };
  auto integrand = [&](double z) { return sup_at(mu_star + tau * z); };

  std::vector<double> breaks;
  if (opts.monotone_boundary) {
    // kinks where the two boundary probabilities cross
    auto diff = [&](double z) {
      const double psi0 = mu_star + tau * z;
      return locnormal_prob(model, psi0, psi0 + delta, Side::Favor, opts.cell_half_width) -
             locnormal_prob(model, psi0, psi0 - delta, Side::Favor, opts.cell_half_width);
    };
    breaks = bracketed_roots(diff, -12.0, 12.0, 480);
  }
  const IntegralResult coarse = std_normal_expectation_piecewise(integrand, breaks);
  // refinement: split every panel once more
  std::vector<double> refined_breaks = breaks;
  {
    std::vector<double> edges{-12.0};
    edges.insert(edges.end(), breaks.begin(), breaks.end());
    edges.push_back(12.0);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) refined_breaks.push_back(0.5 * (edges[i] + edges[i + 1]));
  }
  const IntegralResult fine = std_normal_expectation_piecewise(integrand, refined_breaks);
  if (converged(coarse.value, fine.value, opts.quadrature_tolerance)) {
    rep.avg_bias_in_favor = std::clamp(fine.value, 0.0, 1.0);
  } else {
    rep.fallback = true;
    rep.warnings.push_back("average bias in favor: quadrature refinement changed the value by more "
                           "than the tolerance; using Monte Carlo");
    const auto mc = mc_avg_favor(model, delta, opts);
    rep.avg_bias_in_favor = mc.value;
    rep.se_avg_in_favor = mc.se;
  }
}

void finite_against_e(const FiniteModel& model, BiasEReport& rep) {
  double avg = 0.0;
  double sup = -1.0;
  std::size_t where = 0;
  for (std::size_t k = 0; k < model.n_psi(); ++k) {
    if (!(model.prior_psi(k) > 0.0)) continue;
    const double a = against_prob_finite(model, k, k);
    avg += model.prior_psi(k) * a;
    if (a > sup) {
      sup = a;
      where = k;
    }
  }
  rep.avg_bias_against = avg;
  rep.sup_bias_against = sup;
  rep.sup_location = model.psi_label(where);
}

double finite_sup_favor(const FiniteModel& model, std::size_t k, double delta, std::optional<std::size_t>* arg) {
  double best = 0.0;
  bool any = false;
  for (std::size_t j = 0; j < model.n_psi(); ++j) {
    if (!(model.prior_psi(j) > 0.0) || model.psi_distance(k, j) < delta) continue;
    const double f = favor_prob_finite(model, k, j);
    if (!any || f > best) {
      best = f;
      if (arg) *arg = j;
      any = true;
    }
  }
  return best;
}

void check_delta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw DomainError("delta (the difference that matters) must be given and positive");
}

}  // namespace

// ---------------------------------------------------------------------------

double favor_prob_locnormal(const LocationNormalSpec& spec, double mu0, double mu_true) {
  spec.validate();
  const auto w = favor_window(spec, mu0);
  const double shift = std::sqrt(static_cast<double>(spec.n)) * (mu_true - mu0) / std::sqrt(spec.sigma0_sq);
  // z = shift + Z; event |z + d| <= r
  return normal_interval_prob(-w.r - w.d - shift, w.r - w.d - shift, 0.0, 1.0);
}

double favor_prob_locnormal_cell(const LocationNormalSpec& spec, double mu0, double half_width,
                                 double mu_true) {
  if (!(half_width > 0.0)) throw DomainError("cell half-width must be positive");
  const LocationNormal model(spec);
  const double lo = mu0 - half_width;
  const double hi = mu0 + half_width;
  const double prior_content = model.prior_content(lo, hi);
  if (!(prior_content >= kMinCellPrior))
    throw DomainError("hypothesis cell has negligible prior content");
  const double n = static_cast<double>(spec.n);
  const double post_var = model.posterior(0.0).var;
  const double post_sd = std::sqrt(post_var);
  // Posterior content of the cell is unimodal in the posterior mean, with
  // its maximum at the cell center; RB >= 1 on an interval of means.
  auto gap = [&](double m) { return normal_interval_prob(lo, hi, m, post_sd) - prior_content; };
  if (gap(mu0) < 0.0) return 0.0;
  auto boundary = [&](double dir) {
    double step = std::max(half_width, post_sd);
    double inner = mu0;
    double outer = mu0 + dir * step;
    while (gap(outer) >= 0.0) {
      inner = outer;
      step *= 2.0;
      outer = mu0 + dir * step;
    }
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(
        gap, std::min(inner, outer), std::max(inner, outer), boost::math::tools::eps_tolerance<double>(50),
        iters);
    return 0.5 * (r.first + r.second);
  };
  const double m_lo = boundary(-1.0);
  const double m_hi = boundary(+1.0);
  auto xbar_of = [&](double m) {
    return (m / post_var - spec.mu_star / spec.tau_star_sq) * spec.sigma0_sq / n;
  };
  return normal_interval_prob(xbar_of(m_lo), xbar_of(m_hi), mu_true, std::sqrt(spec.sigma0_sq / n));
}

double against_prob_finite(const FiniteModel& model, std::size_t psi0, std::size_t psi_true) {
  double p = 0.0;
  for (std::size_t x = 0; x < model.n_x(); ++x) {
    if (!(model.marginal(x) > 0.0)) continue;
    if (model.rb_psi(psi0, x) <= 1.0) p += model.conditional_predictive(x, psi_true);
  }
  return p;
}

double favor_prob_finite(const FiniteModel& model, std::size_t psi0, std::size_t psi_true) {
  double p = 0.0;
  for (std::size_t x = 0; x < model.n_x(); ++x) {
    if (!(model.marginal(x) > 0.0)) continue;
    if (model.rb_psi(psi0, x) >= 1.0) p += model.conditional_predictive(x, psi_true);
  }
  return p;
}

ProbEstimate bias_against_h(const InferenceBundle& bundle, const PsiValue& psi0, const BiasOptions& opts) {
  if (const auto* fm = std::get_if<FiniteModel>(&bundle)) {
    const std::size_t k = finite_psi(*fm, psi0);
    return {against_prob_finite(*fm, k, k), 0.0};
  }
  const double v = as_number(psi0);
  return std::visit(
      [&](const auto& model) -> ProbEstimate {
        using M = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<M, FiniteModel>) {
          return {};
        } else {
          if (!model.in_support(v)) throw DomainError("psi0 lies outside the parameter space");
          if (resolve(opts.method) == Method::Exact)
            return {exact_prob(model, v, v, Side::Against, opts.cell_half_width), 0.0};
          const auto m = mc_prob(model, v, v, Side::Against, opts.cell_half_width, opts.mc,
                                 stream_tag("bias_against_h"));
          return {m.p(), m.se()};
        }
      },
      bundle);
}

std::pair<ProbEstimate, std::optional<PsiValue>> bias_in_favor_h(const InferenceBundle& bundle,
                                                                 const PsiValue& psi0, double delta,
                                                                 const BiasOptions& opts) {
  check_delta(delta);
  if (const auto* fm = std::get_if<FiniteModel>(&bundle)) {
    const std::size_t k = finite_psi(*fm, psi0);
    std::optional<std::size_t> arg;
    const double v = finite_sup_favor(*fm, k, delta, &arg);
    if (!arg) return {ProbEstimate{}, std::nullopt};
    return {ProbEstimate{v, 0.0}, PsiValue{fm->psi_label(*arg)}};
  }
  const double v = as_number(psi0);
  if (const auto* ln = std::get_if<LocationNormal>(&bundle)) return continuous_favor_h(*ln, v, delta, opts);
  const auto& bb = std::get<BetaBinomial>(bundle);
  if (!bb.in_support(v)) throw DomainError("psi0 lies outside the parameter space");
  return continuous_favor_h(bb, v, delta, opts);
}

BiasHReport bias_h(const InferenceBundle& bundle, const PsiValue& psi0, double delta, const BiasOptions& opts) {
  BiasHReport rep;
  rep.psi0 = psi0;
  rep.delta = delta;
  const bool finite = std::holds_alternative<FiniteModel>(bundle);
  rep.method = finite ? Method::Exact : resolve(opts.method);
  const auto against = bias_against_h(bundle, psi0, opts);
  rep.bias_against = against.value;
  rep.se_against = against.se;
  const auto [favor, arg] = bias_in_favor_h(bundle, psi0, delta, opts);
  rep.bias_in_favor = favor.value;
  rep.se_in_favor = favor.se;
  rep.favor_argsup = arg;
  return rep;
}

BiasEReport bias_against_e(const InferenceBundle& bundle, const BiasOptions& opts) {
  BiasEReport rep;
  if (const auto* fm = std::get_if<FiniteModel>(&bundle)) {
    rep.method = Method::Exact;
    finite_against_e(*fm, rep);
  } else if (const auto* ln = std::get_if<LocationNormal>(&bundle);
             ln && resolve(opts.method) == Method::Exact) {
    rep.method = Method::Exact;
    locnormal_against_e(*ln, opts, rep);
  } else {
    rep.method = Method::MonteCarlo;
    std::visit(
        [&](const auto& model) {
          using M = std::decay_t<decltype(model)>;
          if constexpr (!std::is_same_v<M, FiniteModel>) {
            const auto avg = mc_avg_against(model, opts);
            rep.avg_bias_against = avg.value;
            rep.se_avg_against = avg.se;
            const auto [sup, where] = mc_sup_against(model, opts);
            rep.sup_bias_against = sup.value;
            rep.se_sup_against = sup.se;
            rep.sup_location = where;
          }
        },
        bundle);
  }
  rep.implied_coverage = 1.0 - rep.avg_bias_against;
  return rep;
}

BiasEReport bias_in_favor_e(const InferenceBundle& bundle, double delta, const BiasOptions& opts) {
  check_delta(delta);
  BiasEReport rep;
  rep.delta = delta;
  if (const auto* fm = std::get_if<FiniteModel>(&bundle)) {
    rep.method = Method::Exact;
    double avg = 0.0;
    for (std::size_t k = 0; k < fm->n_psi(); ++k)
      if (fm->prior_psi(k) > 0.0) avg += fm->prior_psi(k) * finite_sup_favor(*fm, k, delta, nullptr);
    rep.avg_bias_in_favor = avg;
  } else if (const auto* ln = std::get_if<LocationNormal>(&bundle);
             ln && resolve(opts.method) == Method::Exact) {
    rep.method = Method::Exact;
    locnormal_favor_e(*ln, delta, opts, rep);
  } else {
    rep.method = Method::MonteCarlo;
    std::visit(
        [&](const auto& model) {
          using M = std::decay_t<decltype(model)>;
          if constexpr (!std::is_same_v<M, FiniteModel>) {
            const auto avg = mc_avg_favor(model, delta, opts);
            rep.avg_bias_in_favor = avg.value;
            rep.se_avg_in_favor = avg.se;
          }
        },
        bundle);
  }
  return rep;
}

BiasEReport bias_e(const InferenceBundle& bundle, double delta, const BiasOptions& opts) {
  BiasEReport rep = bias_against_e(bundle, opts);
  const BiasEReport favor = bias_in_favor_e(bundle, delta, opts);
  rep.avg_bias_in_favor = favor.avg_bias_in_favor;
  rep.se_avg_in_favor = favor.se_avg_in_favor;
  rep.delta = delta;
  rep.fallback = rep.fallback || favor.fallback;
  rep.warnings.insert(rep.warnings.end(), favor.warnings.begin(), favor.warnings.end());
  return rep;
}

DesignResult design_sample_size(const std::function<InferenceBundle(std::int64_t)>& family,
                                const PsiValue& psi0, double delta, const DesignTargets& targets,
                                const std::vector<std::int64_t>& n_grid, const BiasOptions& opts) {
  if (!targets.max_bias_against && !targets.max_bias_in_favor)
    throw DomainError("design needs at least one bias target");
  for (const auto& t : {targets.max_bias_against, targets.max_bias_in_favor})
    if (t && !(*t > 0.0 && *t < 1.0)) throw DomainError("bias targets must lie in (0,1)");
  if (n_grid.empty()) throw DomainError("design needs a nonempty sample-size grid");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()) ||
      std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end())
    throw DomainError("sample-size grid must be strictly ascending");

  DesignResult result;
  for (const auto n : n_grid) {
    DesignRow row;
    row.n = n;
    row.report = bias_h(family(n), psi0, delta, opts);
    row.admissible = (!targets.max_bias_against || row.report.bias_against <= *targets.max_bias_against) &&
                     (!targets.max_bias_in_favor || row.report.bias_in_favor <= *targets.max_bias_in_favor);
    result.table.push_back(row);
    if (row.admissible) {
      result.n = n;
      return result;
    }
  }
  throw DesignError("no sample size on the grid meets the bias targets", std::move(result.table));
}

}  // namespace relbelief
