#include "relbelief/models.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/binomial.hpp>

#include "relbelief/errors.hpp"
#include "relbelief/numerics.hpp"

namespace relbelief {

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double sample_mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

}  // namespace

double NormalParams::sd() const { return std::sqrt(var); }

// ---------------------------------------------------------------------------
// location normal

void LocationNormalSpec::validate() const {
  if (n < 1) throw DomainError("location-normal sample size n must be >= 1");
  if (!(sigma0_sq > 0.0) || !std::isfinite(sigma0_sq))
    throw DomainError("location-normal sigma0_sq must be positive");
  if (!(tau_star_sq > 0.0) || !std::isfinite(tau_star_sq))
    throw DomainError("location-normal tau_star_sq must be positive");
  if (!std::isfinite(mu_star)) throw DomainError("location-normal mu_star must be finite");
}

LocationNormal::LocationNormal(const LocationNormalSpec& spec) : spec_(spec) { spec_.validate(); }

NormalParams LocationNormal::prior() const { return {spec_.mu_star, spec_.tau_star_sq}; }

NormalParams LocationNormal::posterior(double xbar) const {
  const double n = static_cast<double>(spec_.n);
  const double var = 1.0 / (n / spec_.sigma0_sq + 1.0 / spec_.tau_star_sq);
  const double mean = var * (n * xbar / spec_.sigma0_sq + spec_.mu_star / spec_.tau_star_sq);
  return {mean, var};
}

NormalParams LocationNormal::sampling(double mu) const {
  return {mu, spec_.sigma0_sq / static_cast<double>(spec_.n)};
}

NormalParams LocationNormal::prior_predictive() const {
  return {spec_.mu_star, spec_.tau_star_sq + spec_.sigma0_sq / static_cast<double>(spec_.n)};
}

double LocationNormal::reduce(const Data& data) const {
  if (const auto* s = std::get_if<Statistic>(&data)) return s->value;
  if (const auto* s = std::get_if<Sample>(&data)) {
    if (static_cast<std::int64_t>(s->values.size()) != spec_.n)
      throw DomainError("sample has " + std::to_string(s->values.size()) +
                        " values but the model declares n = " + std::to_string(spec_.n));
    return sample_mean(s->values);
  }
  throw DomainError("location-normal data must be a sample or the sample mean");
}

double LocationNormal::prior_content(double lo, double hi) const {
  const auto p = prior();
  return normal_interval_prob(lo, hi, p.mean, p.sd());
}

double LocationNormal::posterior_content(double lo, double hi, double xbar) const {
  const auto p = posterior(xbar);
  return normal_interval_prob(lo, hi, p.mean, p.sd());
}

double LocationNormal::log_rb_point(double xbar, double psi) const {
  const auto post = posterior(xbar);
  const auto pri = prior();
  return normal_log_pdf(psi, post.mean, post.var) - normal_log_pdf(psi, pri.mean, pri.var);
}

double LocationNormal::rb_cell(double xbar, double lo, double hi) const {
  return posterior_content(lo, hi, xbar) / prior_content(lo, hi);
}

double LocationNormal::sample_prior(Philox4x32& rng) const {
  std::normal_distribution<double> z;
  return spec_.mu_star + std::sqrt(spec_.tau_star_sq) * z(rng);
}

double LocationNormal::sample_statistic(double mu, Philox4x32& rng) const {
  std::normal_distribution<double> z;
  return mu + sampling(mu).sd() * z(rng);
}

std::vector<double> LocationNormal::sample_data(double mu, Philox4x32& rng) const {
  std::normal_distribution<double> z;
  std::vector<double> xs(static_cast<std::size_t>(spec_.n));
  const double sd = std::sqrt(spec_.sigma0_sq);
  for (auto& x : xs) x = mu + sd * z(rng);
  return xs;
}

std::pair<double, double> LocationNormal::default_range(std::optional<double> xbar,
                                                        double coverage) const {
  const double z = std_normal_quantile(0.5 + 0.5 * coverage);
  const auto pri = prior();
  double lo = pri.mean - z * pri.sd();
  double hi = pri.mean + z * pri.sd();
  if (xbar) {
    const auto post = posterior(*xbar);
    lo = std::min(lo, post.mean - z * post.sd());
    hi = std::max(hi, post.mean + z * post.sd());
  }
  return {lo, hi};
}

std::string LocationNormal::digest() const {
  return "location_normal(n=" + std::to_string(spec_.n) +
         ",sigma0_sq=" + format_double(spec_.sigma0_sq) +
         ",mu_star=" + format_double(spec_.mu_star) +
         ",tau_star_sq=" + format_double(spec_.tau_star_sq) + ")";
}

// ---------------------------------------------------------------------------
// beta-binomial

void BetaBinomialSpec::validate() const {
  if (n < 1) throw DomainError("beta-binomial n must be >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("beta-binomial alpha must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta-binomial beta must be positive");
}

BetaBinomial::BetaBinomial(const BetaBinomialSpec& spec) : spec_(spec) { spec_.validate(); }

BetaParams BetaBinomial::prior() const { return {spec_.alpha, spec_.beta}; }

BetaParams BetaBinomial::posterior(double successes) const {
  return {spec_.alpha + successes, spec_.beta + static_cast<double>(spec_.n) - successes};
}

double BetaBinomial::prior_predictive_pmf(std::int64_t s) const {
  if (s < 0 || s > spec_.n) return 0.0;
  const auto n = static_cast<unsigned>(spec_.n);
  const double log_choose = std::log(boost::math::binomial_coefficient<double>(n, static_cast<unsigned>(s)));
  const double sd = static_cast<double>(s);
  const double log_ratio = std::log(boost::math::beta(spec_.alpha + sd, spec_.beta + n - sd)) -
                           std::log(boost::math::beta(spec_.alpha, spec_.beta));
  return std::exp(log_choose + log_ratio);
}

double BetaBinomial::reduce(const Data& data) const {
  double s = 0.0;
  if (const auto* st = std::get_if<Statistic>(&data)) {
    s = st->value;
  } else if (const auto* sm = std::get_if<Sample>(&data)) {
    if (static_cast<std::int64_t>(sm->values.size()) != spec_.n)
      throw DomainError("sample has " + std::to_string(sm->values.size()) +
                        " values but the model declares n = " + std::to_string(spec_.n));
    for (double v : sm->values) {
      if (v != 0.0 && v != 1.0) throw DomainError("beta-binomial sample values must be 0 or 1");
      s += v;
    }
  } else {
    throw DomainError("beta-binomial data must be a 0/1 sample or the success count");
  }
  if (s < 0.0 || s > static_cast<double>(spec_.n) || s != std::floor(s))
    throw DomainError("success count must be an integer in [0, n]");
  return s;
}

namespace {
double beta_interval(const BetaParams& b, double lo, double hi) {
  lo = std::clamp(lo, 0.0, 1.0);
  hi = std::clamp(hi, 0.0, 1.0);
  if (!(hi > lo)) return 0.0;
  const double mode_side = b.alpha / (b.alpha + b.beta);
  if (lo >= mode_side)
    return boost::math::ibetac(b.alpha, b.beta, lo) - boost::math::ibetac(b.alpha, b.beta, hi);
  return boost::math::ibeta(b.alpha, b.beta, hi) - boost::math::ibeta(b.alpha, b.beta, lo);
}

double beta_log_pdf(const BetaParams& b, double x) {
  return (b.alpha - 1.0) * std::log(x) + (b.beta - 1.0) * std::log1p(-x) -
         std::log(boost::math::beta(b.alpha, b.beta));
}
}  // namespace

double BetaBinomial::prior_content(double lo, double hi) const {
  return beta_interval(prior(), lo, hi);
}

double BetaBinomial::posterior_content(double lo, double hi, double successes) const {
  return beta_interval(posterior(successes), lo, hi);
}

double BetaBinomial::log_rb_point(double successes, double psi) const {
  if (!in_support(psi)) throw DomainError("beta-binomial psi must lie in (0,1)");
  return beta_log_pdf(posterior(successes), psi) - beta_log_pdf(prior(), psi);
}

double BetaBinomial::rb_cell(double successes, double lo, double hi) const {
  return posterior_content(lo, hi, successes) / prior_content(lo, hi);
}

double BetaBinomial::sample_prior(Philox4x32& rng) const {
  std::gamma_distribution<double> ga(spec_.alpha, 1.0);
  std::gamma_distribution<double> gb(spec_.beta, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

double BetaBinomial::sample_statistic(double theta, Philox4x32& rng) const {
  std::binomial_distribution<std::int64_t> bin(spec_.n, theta);
  return static_cast<double>(bin(rng));
}

std::pair<double, double> BetaBinomial::default_range(std::optional<double> successes,
                                                      double coverage) const {
  const double tail = 0.5 * (1.0 - coverage);
  auto interval = [&](const BetaParams& b) {
    return std::pair{boost::math::ibeta_inv(b.alpha, b.beta, tail),
                     boost::math::ibetac_inv(b.alpha, b.beta, tail)};
  };
  auto [lo, hi] = interval(prior());
  if (successes) {
    const auto [plo, phi] = interval(posterior(*successes));
    lo = std::min(lo, plo);
    hi = std::max(hi, phi);
  }
  return {lo, hi};
}

std::string BetaBinomial::digest() const {
  return "beta_binomial(n=" + std::to_string(spec_.n) + ",alpha=" + format_double(spec_.alpha) +
         ",beta=" + format_double(spec_.beta) + ")";
}

// ---------------------------------------------------------------------------
// finite

void FiniteModelSpec::validate() const {
  const std::size_t nt = theta_labels.size();
  if (nt == 0) throw DomainError("finite model needs at least one theta");
  if (prior.size() != nt) throw DomainError("finite model needs one prior weight per theta");
  if (x_labels.empty()) throw DomainError("finite model needs at least one data outcome");
  if (likelihood.size() != nt) throw DomainError("finite model needs one likelihood row per theta");
  double total = 0.0;
  for (std::size_t i = 0; i < nt; ++i) {
    if (!(prior[i] >= 0.0)) throw DomainError("prior weight of '" + theta_labels[i] + "' is negative");
    total += prior[i];
    const auto& row = likelihood[i];
    if (row.size() != x_labels.size())
      throw DomainError("likelihood row '" + theta_labels[i] + "' has the wrong length");
    double rs = 0.0;
    for (double v : row) {
      if (!(v >= 0.0)) throw DomainError("likelihood row '" + theta_labels[i] + "' has a negative entry");
      rs += v;
    }
    if (std::abs(rs - 1.0) > 1e-12)
      throw DomainError("likelihood row '" + theta_labels[i] + "' does not sum to 1");
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("finite prior weights do not sum to 1");
  auto unique = [](const std::vector<std::string>& v, const char* what) {
    std::vector<std::string> s = v;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw DomainError(std::string("duplicate ") + what + " label");
  };
  unique(theta_labels, "theta");
  unique(x_labels, "data");
  if (!psi_labels.empty()) {
    unique(psi_labels, "psi");
    if (psi_of_theta.size() != nt) throw DomainError("psi_of_theta needs one entry per theta");
    for (const auto& p : psi_of_theta)
      if (std::find(psi_labels.begin(), psi_labels.end(), p) == psi_labels.end())
        throw DomainError("psi_of_theta names unknown psi '" + p + "'");
  } else if (!psi_of_theta.empty()) {
    throw DomainError("psi_of_theta given without psi_labels");
  }
  const std::size_t np = psi_labels.empty() ? nt : psi_labels.size();
  if (!psi_values.empty() && psi_values.size() != np)
    throw DomainError("psi_values needs one entry per psi");
}

FiniteModel::FiniteModel(FiniteModelSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const std::size_t nt = n_theta();
  if (spec_.psi_labels.empty()) {
    psi_labels_ = spec_.theta_labels;
    for (std::size_t i = 0; i < nt; ++i) psi_index_of_theta_.push_back(i);
  } else {
    psi_labels_ = spec_.psi_labels;
    for (const auto& p : spec_.psi_of_theta)
      psi_index_of_theta_.push_back(static_cast<std::size_t>(
          std::find(psi_labels_.begin(), psi_labels_.end(), p) - psi_labels_.begin()));
  }
  if (spec_.psi_values.empty()) {
    for (std::size_t k = 0; k < psi_labels_.size(); ++k) psi_values_.push_back(static_cast<double>(k));
  } else {
    psi_values_ = spec_.psi_values;
  }

  const std::size_t np = psi_labels_.size();
  prior_psi_.assign(np, 0.0);
  marginal_.assign(n_x(), 0.0);
  psi_joint_.assign(np, std::vector<double>(n_x(), 0.0));
  for (std::size_t t = 0; t < nt; ++t) {
    prior_psi_[psi_index_of_theta_[t]] += spec_.prior[t];
    for (std::size_t x = 0; x < n_x(); ++x) {
      const double j = spec_.prior[t] * spec_.likelihood[t][x];
      marginal_[x] += j;
      psi_joint_[psi_index_of_theta_[t]][x] += j;
    }
  }
}

std::size_t FiniteModel::psi_index(const std::string& label) const {
  const auto it = std::find(psi_labels_.begin(), psi_labels_.end(), label);
  if (it == psi_labels_.end()) throw DomainError("unknown psi value '" + label + "'");
  return static_cast<std::size_t>(it - psi_labels_.begin());
}

std::size_t FiniteModel::x_index(const std::string& label) const {
  const auto it = std::find(spec_.x_labels.begin(), spec_.x_labels.end(), label);
  if (it == spec_.x_labels.end()) throw DomainError("unknown data outcome '" + label + "'");
  return static_cast<std::size_t>(it - spec_.x_labels.begin());
}

double FiniteModel::conditional_predictive(std::size_t x, std::size_t k) const {
  if (!(prior_psi_.at(k) > 0.0))
    throw DomainError("psi '" + psi_labels_[k] + "' has prior probability 0");
  return psi_joint_[k].at(x) / prior_psi_[k];
}

double FiniteModel::posterior_psi(std::size_t k, std::size_t x) const {
  if (!(marginal_.at(x) > 0.0))
    throw DomainError("data outcome '" + spec_.x_labels[x] + "' has prior predictive probability 0");
  return psi_joint_.at(k)[x] / marginal_[x];
}

double FiniteModel::posterior_theta(std::size_t theta, std::size_t x) const {
  if (!(marginal_.at(x) > 0.0))
    throw DomainError("data outcome '" + spec_.x_labels[x] + "' has prior predictive probability 0");
  return spec_.prior.at(theta) * spec_.likelihood.at(theta).at(x) / marginal_[x];
}

double FiniteModel::rb_psi(std::size_t k, std::size_t x) const {
  if (!(prior_psi_.at(k) > 0.0))
    throw DomainError("psi '" + psi_labels_[k] + "' has prior probability 0");
  if (!(marginal_.at(x) > 0.0))
    throw DomainError("data outcome '" + spec_.x_labels[x] + "' has prior predictive probability 0");
  return psi_joint_[k][x] / (prior_psi_[k] * marginal_[x]);
}

double FiniteModel::rb_theta(std::size_t theta, std::size_t x) const {
  if (!(spec_.prior.at(theta) > 0.0))
    throw DomainError("theta '" + spec_.theta_labels[theta] + "' has prior probability 0");
  if (!(marginal_.at(x) > 0.0))
    throw DomainError("data outcome '" + spec_.x_labels[x] + "' has prior predictive probability 0");
  return spec_.likelihood[theta][x] / marginal_[x];
}

double FiniteModel::psi_distance(std::size_t k, std::size_t j) const {
  return std::abs(psi_values_.at(k) - psi_values_.at(j));
}

std::size_t FiniteModel::reduce(const Data& data) const {
  if (const auto* o = std::get_if<Outcome>(&data)) return x_index(o->label);
  throw DomainError("finite-model data must name an observed outcome");
}

std::string FiniteModel::digest() const {
  return "finite(theta=" + std::to_string(n_theta()) + ",x=" + std::to_string(n_x()) +
         ",psi=" + std::to_string(n_psi()) + ")";
}

// ---------------------------------------------------------------------------

InferenceBundle make_location_normal(const LocationNormalSpec& spec) { return LocationNormal(spec); }

InferenceBundle make_beta_binomial(std::int64_t n, double alpha, double beta) {
  return BetaBinomial(BetaBinomialSpec{n, alpha, beta});
}

InferenceBundle make_finite(FiniteModelSpec spec) { return FiniteModel(std::move(spec)); }

std::string bundle_digest(const InferenceBundle& bundle) {
  return std::visit([](const auto& m) { return m.digest(); }, bundle);
}

std::vector<Cell> make_cells(const Discretization& disc, double default_lo, double default_hi,
                             double support_lo, double support_hi) {
  const double delta = disc.delta;
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("discretization delta must be positive");
  double lo = disc.lo.value_or(default_lo);
  double hi = disc.hi.value_or(default_hi);
  if (!(lo < hi)) throw DomainError("discretization range needs lo < hi");
  if (disc.anchor) {
    lo = std::min(lo, *disc.anchor - delta);
    hi = std::max(hi, *disc.anchor + delta);
  }
  lo = std::max(lo, support_lo);
  hi = std::min(hi, support_hi);
  if (!(lo < hi)) throw DomainError("discretization range lies outside the parameter support");

  const double width = 2.0 * delta;
  const double n_cells = std::ceil((hi - lo) / width) + 1.0;
  if (n_cells > 2e7) throw DomainError("discretization would need more than 2e7 cells; increase delta");

  std::vector<double> edges;
  if (disc.anchor) {
    // edges at anchor + (2k + 1) delta
    const double a = *disc.anchor;
    auto k_lo = static_cast<std::int64_t>(std::floor((lo - a - delta) / width));
    while (a + static_cast<double>(2 * k_lo + 1) * delta > lo) --k_lo;
    edges.push_back(lo);
    for (std::int64_t k = k_lo + 1;; ++k) {
      const double e = a + static_cast<double>(2 * k + 1) * delta;
      if (e >= hi) break;
      if (e > lo) edges.push_back(e);
    }
    edges.push_back(hi);
  } else {
    for (std::int64_t k = 0;; ++k) {
      const double e = lo + static_cast<double>(k) * width;
      if (e >= hi) break;
      edges.push_back(e);
    }
    edges.push_back(hi);
  }

  std::vector<Cell> cells;
  cells.reserve(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    Cell c{edges[i], edges[i + 1], 0.5 * (edges[i] + edges[i + 1])};
    if (disc.anchor && c.lo <= *disc.anchor && *disc.anchor < c.hi) c.center = *disc.anchor;
    cells.push_back(c);
  }
  return cells;
}

}  // namespace relbelief
