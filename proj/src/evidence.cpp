#include "relbelief/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "relbelief/errors.hpp"
#include "relbelief/numerics.hpp"

namespace relbelief {

namespace {

template <class Model>
EvidenceProfile continuous_profile(const Model& model, const Data& data,
                                   const std::optional<Discretization>& disc, double support_lo,
                                   double support_hi) {
  if (!disc) throw DomainError("a discretization (delta) is required for a continuous interest");
  EvidenceProfile prof;
  prof.n = model.spec().n;
  prof.t_obs = model.reduce(data);
  prof.bundle_digest = model.digest();
  const auto [lo, hi] = model.default_range(prof.t_obs);
  const std::vector<Cell> cells = make_cells(*disc, lo, hi, support_lo, support_hi);

  prof.cells.resize(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    ProfileCell& pc = prof.cells[i];
    pc.lo = cells[i].lo;
    pc.hi = cells[i].hi;
    pc.center = cells[i].center;
    pc.prior = model.prior_content(pc.lo, pc.hi);
    pc.posterior = model.posterior_content(pc.lo, pc.hi, prof.t_obs);
    pc.usable = pc.prior >= kMinCellPrior;
    pc.rb = pc.usable ? pc.posterior / pc.prior : 0.0;
  }
  for (std::size_t i = 0; i < prof.cells.size(); ++i)
    if (!prof.cells[i].usable) prof.unusable.push_back(i);
  return prof;
}

EvidenceProfile finite_profile(const FiniteModel& model, const Data& data) {
  EvidenceProfile prof;
  prof.categorical = true;
  prof.n = 1;
  const std::size_t x = model.reduce(data);
  prof.t_obs = static_cast<double>(x);
  prof.bundle_digest = model.digest();
  for (std::size_t k = 0; k < model.n_psi(); ++k) {
    ProfileCell pc;
    pc.lo = pc.hi = pc.center = model.psi_value(k);
    pc.label = model.psi_label(k);
    pc.prior = model.prior_psi(k);
    pc.posterior = model.posterior_psi(k, x);
    pc.usable = pc.prior >= kMinCellPrior;
    pc.rb = pc.usable ? model.rb_psi(k, x) : 0.0;
    if (!pc.usable) prof.unusable.push_back(k);
    prof.cells.push_back(std::move(pc));
  }
  return prof;
}

std::size_t usable_cell(const EvidenceProfile& profile, std::size_t cell) {
  if (cell >= profile.cells.size()) throw DomainError("cell index out of range");
  if (!profile.cells[cell].usable)
    throw DomainError("hypothesized value lies in a cell with negligible prior content");
  return cell;
}

std::size_t locate_psi(const EvidenceProfile& profile, const PsiValue& psi) {
  return std::visit([&](const auto& v) { return profile.locate(v); }, psi);
}

}  // namespace

std::size_t EvidenceProfile::locate(double psi) const {
  if (categorical) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (cells[i].center == psi) return i;
    throw DomainError("no psi value equals " + std::to_string(psi));
  }
  if (cells.empty() || !(psi >= cells.front().lo && psi <= cells.back().hi))
    throw DomainError("psi0 = " + std::to_string(psi) + " lies outside the grid range");
  const auto it = std::upper_bound(cells.begin(), cells.end(), psi,
                                   [](double v, const ProfileCell& c) { return v < c.hi; });
  return it == cells.end() ? cells.size() - 1 : static_cast<std::size_t>(it - cells.begin());
}

std::size_t EvidenceProfile::locate(const std::string& label) const {
  if (!categorical) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(label, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != label.size()) throw DomainError("psi0 '" + label + "' is not a number");
    return locate(v);
  }
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (cells[i].label == label) return i;
  throw DomainError("unknown psi value '" + label + "'");
}

double EvidenceProfile::prior_total() const {
  double s = 0.0;
  for (const auto& c : cells)
    if (c.usable) s += c.prior;
  return s;
}

double EvidenceProfile::posterior_total() const {
  double s = 0.0;
  for (const auto& c : cells)
    if (c.usable) s += c.posterior;
  return s;
}

EvidenceProfile rb_profile(const InferenceBundle& bundle, const Data& data,
                           const std::optional<Discretization>& disc) {
  if (const auto* ln = std::get_if<LocationNormal>(&bundle))
    return continuous_profile(*ln, data, disc, -std::numeric_limits<double>::infinity(),
                              std::numeric_limits<double>::infinity());
  if (const auto* bb = std::get_if<BetaBinomial>(&bundle))
    return continuous_profile(*bb, data, disc, 0.0, 1.0);
  return finite_profile(std::get<FiniteModel>(bundle), data);
}

CredibleRegion credible_region(const EvidenceProfile& profile, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("credible level gamma must lie in (0,1)");
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < profile.cells.size(); ++i)
    if (profile.cells[i].usable) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return profile.cells[a].rb > profile.cells[b].rb;
  });

  // Walk rb levels downward; the cutoff is the first level whose upper set
  // reaches content gamma.
  CredibleRegion region;
  region.gamma = gamma;
  double content = 0.0;
  std::size_t i = 0;
  bool reached = false;
  while (i < order.size()) {
    const double level = profile.cells[order[i]].rb;
    while (i < order.size() && profile.cells[order[i]].rb == level) {
      content += profile.cells[order[i]].posterior;
      ++i;
    }
    if (content >= gamma - 1e-12) {
      region.cutoff = level;
      reached = true;
      break;
    }
  }
  if (!reached) throw DomainError("credible level exceeds the total posterior content of the grid");
  for (std::size_t j = 0; j < i; ++j) region.cells.push_back(order[j]);
  std::sort(region.cells.begin(), region.cells.end());
  for (auto c : region.cells) {
    region.posterior_content += profile.cells[c].posterior;
    region.prior_content += profile.cells[c].prior;
  }
  return region;
}

EstimateReport estimate(const EvidenceProfile& profile, std::optional<double> gamma) {
  EstimateReport rep;
  bool any = false;
  for (std::size_t i = 0; i < profile.cells.size(); ++i) {
    const auto& c = profile.cells[i];
    if (!c.usable) continue;
    if (!any || c.rb > rep.max_rb) {
      rep.max_rb = c.rb;
      rep.tied_cells.clear();
      any = true;
    }
    if (c.rb == rep.max_rb) rep.tied_cells.push_back(i);
    if (c.rb > 1.0) {
      rep.plausible_region.push_back(i);
      rep.pl_posterior_content += c.posterior;
      rep.pl_prior_content += c.prior;
    }
  }
  if (!any) throw DomainError("profile has no usable cells");
  rep.psi_hat_cell = *std::min_element(rep.tied_cells.begin(), rep.tied_cells.end(),
                                       [&](std::size_t a, std::size_t b) {
                                         return profile.cells[a].center < profile.cells[b].center;
                                       });
  rep.psi_hat = profile.cells[rep.psi_hat_cell].center;
  rep.psi_hat_label = profile.cells[rep.psi_hat_cell].label;

  if (gamma) {
    if (*gamma > rep.pl_posterior_content + 1e-12)
      throw DomainError("credible level exceeds plausible-region posterior content");
    rep.credible = credible_region(profile, *gamma);
  }
  return rep;
}

double strength(const EvidenceProfile& profile, std::size_t cell) {
  const double rb0 = profile.cells[usable_cell(profile, cell)].rb;
  double s = 0.0;
  for (const auto& c : profile.cells)
    if (c.usable && c.rb <= rb0) s += c.posterior;
  return std::min(s, 1.0);
}

double strength(const EvidenceProfile& profile, const PsiValue& psi0) {
  return strength(profile, locate_psi(profile, psi0));
}

double strength(const EvidenceProfile& profile, double psi0) {
  return strength(profile, PsiValue{psi0});
}

HypothesisAssessment assess(const EvidenceProfile& profile, const PsiValue& psi0) {
  HypothesisAssessment out;
  out.psi0 = psi0;
  out.cell = usable_cell(profile, locate_psi(profile, psi0));
  const auto& c = profile.cells[out.cell];
  out.rb0 = c.rb;
  out.strength = strength(profile, out.cell);
  out.verdict = verdict_from_rb(out.rb0);
  out.markov_lower = c.posterior;
  out.markov_upper = out.rb0;
  return out;
}

double rb_locnormal_exact(const LocationNormalSpec& spec, double xbar, double mu0) {
  spec.validate();
  const double n = static_cast<double>(spec.n);
  const double sigma0 = std::sqrt(spec.sigma0_sq);
  const double ratio = n * spec.tau_star_sq / spec.sigma0_sq;
  const double shrink = 1.0 / (1.0 + spec.sigma0_sq / (n * spec.tau_star_sq));
  const double u = std::sqrt(n) * (xbar - mu0) / sigma0 +
                   sigma0 * (spec.mu_star - mu0) / (std::sqrt(n) * spec.tau_star_sq);
  const double exponent =
      -0.5 * shrink * u * u + (mu0 - spec.mu_star) * (mu0 - spec.mu_star) / (2.0 * spec.tau_star_sq);
  return std::sqrt(1.0 + ratio) * std::exp(exponent);
}

double tail_difference_locnormal(const LocationNormalSpec& spec, double xbar, double mu0) {
  spec.validate();
  const double n = static_cast<double>(spec.n);
  const double z = std::sqrt(n) * std::abs(xbar - mu0) / std::sqrt(spec.sigma0_sq);
  // RB(mu0|x) >= 1 iff z^2 <= log(1 + n tau^2/sigma^2) + (xbar - mu*)^2 / (tau^2 + sigma^2/n)
  const double pred_var = spec.tau_star_sq + spec.sigma0_sq / n;
  const double d = xbar - spec.mu_star;
  const double boundary = std::sqrt(std::log1p(n * spec.tau_star_sq / spec.sigma0_sq) + d * d / pred_var);
  return 2.0 * (std_normal_sf(z) - std_normal_sf(boundary));
}

EvidenceProfile reparam_profile(const EvidenceProfile& profile,
                                const std::function<double(double)>& lambda) {
  EvidenceProfile out = profile;
  if (profile.cells.empty()) return out;
  // Check strict monotonicity over every edge and center in grid order.
  std::vector<double> points;
  for (const auto& c : profile.cells) {
    if (!profile.categorical) points.push_back(c.lo);
    points.push_back(c.center);
  }
  if (!profile.categorical) points.push_back(profile.cells.back().hi);
  std::vector<double> mapped(points.size());
  std::transform(points.begin(), points.end(), mapped.begin(), lambda);
  bool increasing = true, decreasing = true;
  for (std::size_t i = 0; i + 1 < mapped.size(); ++i) {
    if (!std::isfinite(mapped[i]) || !std::isfinite(mapped[i + 1]))
      throw DomainError("reparameterization is not finite on the grid");
    if (points[i + 1] > points[i]) {
      increasing = increasing && mapped[i + 1] > mapped[i];
      decreasing = decreasing && mapped[i + 1] < mapped[i];
    } else if (points[i + 1] < points[i]) {
      increasing = increasing && mapped[i + 1] < mapped[i];
      decreasing = decreasing && mapped[i + 1] > mapped[i];
    }
  }
  if (profile.categorical) {
    // categorical psi values need not be sorted; compare all pairs
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = 0; j < points.size(); ++j)
        if (points[i] < points[j]) {
          increasing = increasing && mapped[i] < mapped[j];
          decreasing = decreasing && mapped[i] > mapped[j];
        }
  }
  if (!increasing && !decreasing) throw DomainError("reparameterization is not strictly monotone on the grid");

  for (auto& c : out.cells) {
    double lo = lambda(c.lo), hi = lambda(c.hi);
    if (lo > hi) std::swap(lo, hi);
    c.lo = lo;
    c.hi = hi;
    c.center = lambda(c.center);
  }
  if (!increasing && !profile.categorical) {
    std::reverse(out.cells.begin(), out.cells.end());
    const std::size_t last = out.cells.size() - 1;
    for (auto& u : out.unusable) u = last - u;
    std::sort(out.unusable.begin(), out.unusable.end());
  }
  return out;
}

}  // namespace relbelief
