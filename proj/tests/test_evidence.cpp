#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "relbelief/errors.hpp"
#include "relbelief/evidence.hpp"
#include "relbelief/numerics.hpp"
#include "support/finite_oracle.hpp"

using namespace relbelief;

namespace {

EvidenceProfile ln_profile(const LocationNormalSpec& spec, double xbar, double delta,
                           std::optional<double> anchor = std::nullopt,
                           std::optional<std::pair<double, double>> range = std::nullopt) {
  Discretization d;
  d.delta = delta;
  d.anchor = anchor;
  if (range) {
    d.lo = range->first;
    d.hi = range->second;
  }
  return rb_profile(make_location_normal(spec), Statistic{xbar}, d);
}

std::vector<EvidenceProfile> assorted_profiles() {
  std::vector<EvidenceProfile> out;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> c(-2.0, 2.0), u(0.2, 3.0);
  for (int i = 0; i < 12; ++i)
    out.push_back(ln_profile({1 + static_cast<std::int64_t>(rng() % 50), u(rng), c(rng), u(rng)}, c(rng), 0.05));
  for (int i = 0; i < 12; ++i) {
    const auto spec = testsupport::random_finite_spec(rng);
    out.push_back(rb_profile(make_finite(spec), Outcome{spec.x_labels[rng() % spec.x_labels.size()]}, std::nullopt));
  }
  out.push_back(rb_profile(make_beta_binomial(20, 2.0, 2.0), Statistic{14.0}, Discretization{0.02, {}, {}, {}}));
  return out;
}

}  // namespace

TEST(Profile, CenterCellApproachesClosedFormAsCellsShrink) {
  const LocationNormalSpec unit{1, 1.0, 0.0, 1.0};
  const auto p = ln_profile(unit, 0.0, 1e-4, 0.0);
  EXPECT_NEAR(p.cells[p.locate(0.0)].rb, std::sqrt(2.0), 1e-6);

  const LocationNormalSpec spec{20, 1.0, 1.0, 1.0};
  const double exact = rb_locnormal_exact(spec, 0.3, 0.0);
  double prev = INFINITY;
  for (double delta : {0.1, 0.01, 0.001}) {
    const auto q = ln_profile(spec, 0.3, delta, 0.0);
    const double err = std::abs(q.cells[q.locate(0.0)].rb - exact);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev / exact, 1e-5);
}

TEST(Profile, ClosedFormGrowsWithDiffusePrior) {
  const double z = 2.0;
  double prev = 0.0;
  for (double tau_sq : {1.0, 1e2, 1e4, 1e6}) {
    const double rb = rb_locnormal_exact({100, 1.0, 0.0, tau_sq}, z / 10.0, 0.0);
    EXPECT_GT(rb, prev);
    prev = rb;
  }
  EXPECT_GT(prev, 10.0);
  EXPECT_NEAR(rb_locnormal_exact({7, 2.0, 0.4, 3.0}, 0.4, 0.4), std::sqrt(1.0 + 7 * 3.0 / 2.0), 1e-14);
}

TEST(Profile, UniversalInvariants) {
  for (const auto& p : assorted_profiles()) {
    double max_rb = 0.0, sum_rb_prior = 0.0;
    for (std::size_t i = 0; i < p.cells.size(); ++i) {
      const auto& c = p.cells[i];
      if (!c.usable) continue;
      max_rb = std::max(max_rb, c.rb);
      sum_rb_prior += c.rb * c.prior;
      const double s = strength(p, i);
      EXPECT_LE(c.posterior, s + 1e-9);
      EXPECT_LE(s, std::min(1.0, c.rb) + 1e-9);
    }
    EXPECT_GE(max_rb, 1.0 - 1e-9);
    EXPECT_NEAR(sum_rb_prior, p.posterior_total(), 1e-12);
    EXPECT_LE(p.prior_total(), 1.0 + 1e-12);
    EXPECT_LE(p.posterior_total(), 1.0 + 1e-12);
  }
}

TEST(Profile, CredibleRegionsNestAndCarryEvidence) {
  for (const auto& p : assorted_profiles()) {
    const auto est = estimate(p);
    std::vector<std::size_t> prev;
    for (double g : {0.05, 0.2, 0.4, 0.6, 0.8}) {
      if (g > est.pl_posterior_content) break;
      const auto c = credible_region(p, g);
      EXPECT_GE(c.posterior_content, g - 1e-12);
      EXPECT_GE(c.rb(), 1.0 - 1e-12);
      EXPECT_TRUE(std::includes(c.cells.begin(), c.cells.end(), prev.begin(), prev.end()));
      EXPECT_TRUE(std::includes(est.plausible_region.begin(), est.plausible_region.end(), c.cells.begin(), c.cells.end()));
      prev = c.cells;
    }
  }
}

TEST(Profile, CredibleAtPlausibleContentIsThePlausibleRegion) {
  const auto p = ln_profile({20, 1.0, 0.0, 1.0}, 0.3, 0.01);
  const auto est = estimate(p);
  const auto c = credible_region(p, est.pl_posterior_content);
  EXPECT_EQ(c.cells, est.plausible_region);
  try {
    estimate(p, est.pl_posterior_content + 0.01);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_STREQ(e.what(), "credible level exceeds plausible-region posterior content");
  }
}

TEST(Estimate, ArgmaxCellHoldsTheAnalyticMaximizer) {
  const LocationNormalSpec spec{20, 1.0, 1.0, 2.0};
  const double xbar = 0.3;
  LocationNormal m(spec);
  const auto post = m.posterior(xbar);
  const double mu = (post.mean / post.var - spec.mu_star / spec.tau_star_sq) / (1.0 / post.var - 1.0 / spec.tau_star_sq);
  const auto p = ln_profile(spec, xbar, 0.005);
  const auto est = estimate(p);
  EXPECT_LE(std::abs(est.psi_hat - mu), 0.0100001);
  EXPECT_NEAR(strength(p, est.psi_hat_cell), 1.0, 1e-12);
  EXPECT_TRUE(std::binary_search(est.plausible_region.begin(), est.plausible_region.end(), est.psi_hat_cell));
}

TEST(Estimate, TiesBreakToSmallestCenter) {
  FiniteModelSpec spec;
  spec.theta_labels = {"a", "b", "c"};
  spec.prior = {0.25, 0.25, 0.5};
  spec.x_labels = {"u", "v"};
  spec.likelihood = {{0.75, 0.25}, {0.75, 0.25}, {0.25, 0.75}};
  spec.psi_values = {2.0, 1.0, 0.0};
  const auto p = rb_profile(make_finite(spec), Outcome{"u"}, std::nullopt);
  const auto est = estimate(p);
  EXPECT_EQ(est.tied_cells.size(), 2u);
  EXPECT_EQ(est.psi_hat_label, "b");
}

TEST(Assess, ProsecutorShowsWeakEvidenceOfGuilt) {
  const auto p = rb_profile(make_finite(testsupport::prosecutor_spec(1000, 10)), Outcome{"trait"}, std::nullopt);
  const auto a = assess(p, std::string("guilty"));
  EXPECT_EQ(a.verdict.kind, VerdictKind::Favor);
  EXPECT_NEAR(a.rb0, 100.0, 1e-12);
  const auto est = estimate(p);
  EXPECT_EQ(est.psi_hat_label, "guilty");
  EXPECT_NEAR(est.pl_posterior_content, 0.1, 1e-12);
  // the posterior mode is "not guilty"
  EXPECT_GT(p.cells[p.locate(std::string("not_guilty"))].posterior, 0.5);
  const auto b = assess(p, std::string("not_guilty"));
  EXPECT_EQ(b.verdict.kind, VerdictKind::Against);
  EXPECT_LE(b.strength, b.rb0);
}

TEST(Assess, IdenticalLikelihoodIsNeutral) {
  FiniteModelSpec spec;
  spec.theta_labels = {"a", "b"};
  spec.prior = {0.5, 0.5};
  spec.x_labels = {"u", "v"};
  spec.likelihood = {{0.25, 0.75}, {0.25, 0.75}};
  const auto p = rb_profile(make_finite(spec), Outcome{"v"}, std::nullopt);
  EXPECT_EQ(assess(p, std::string("a")).verdict.kind, VerdictKind::Neutral);
}

TEST(Assess, OutOfRangeAndUnusableHypotheses) {
  const auto p = ln_profile({10, 1.0, 0.0, 1.0}, 0.1, 0.05);
  EXPECT_THROW(assess(p, 50.0), DomainError);
  EXPECT_THROW(assess(p, std::string("abc")), DomainError);
  // far tail cells are flagged, never used
  const auto q = ln_profile({10, 1.0, 0.0, 1.0}, 0.1, 0.5, std::nullopt, std::pair{-40.0, 40.0});
  EXPECT_FALSE(q.unusable.empty());
  for (auto i : q.unusable) EXPECT_FALSE(q.cells[i].usable);
  EXPECT_THROW(assess(q, 39.0), DomainError);
  EXPECT_NO_THROW(estimate(q));
}

TEST(Strength, DiffusePriorApproachesTwoSidedPValue) {
  const LocationNormalSpec spec{100, 1.0, 0.0, 1e4};
  for (double z : {0.5, 1.0, 1.96, 3.0}) {
    const double xbar = z / 10.0;
    const auto p = ln_profile(spec, xbar, 1e-4, 0.0, std::pair{xbar - 0.8, xbar + 0.8});
    EXPECT_NEAR(strength(p, 0.0), 2.0 * std_normal_sf(z), 0.005) << "z = " << z;
  }
}

TEST(TailDifference, SignTracksClosedFormRatio) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> c(-2.0, 2.0), u(0.05, 5.0);
  int checked = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const LocationNormalSpec spec{1 + static_cast<std::int64_t>(rng() % 200), u(rng), c(rng), u(rng)};
    const double xbar = c(rng), mu0 = c(rng);
    const double rb = rb_locnormal_exact(spec, xbar, mu0);
    if (std::abs(std::log(rb)) < 1e-9) continue;
    EXPECT_EQ(tail_difference_locnormal(spec, xbar, mu0) > 0.0, rb > 1.0);
    ++checked;
  }
  EXPECT_GT(checked, 90);
  EXPECT_GT(tail_difference_locnormal({5, 1.0, 0.5, 1.0}, 0.5, 0.5), 0.0);
  // diffuse prior: the second tail vanishes
  const double z = 2.2;
  EXPECT_NEAR(tail_difference_locnormal({100, 1.0, 0.0, 1e300}, z / 10, 0.0), 2.0 * std_normal_sf(z), 1e-12);
}

TEST(Reparam, IdentityExpAndAffineMaps) {
  const auto p = ln_profile({20, 1.0, 0.0, 1.0}, 0.4, 0.02);
  const auto est = estimate(p);
  const auto same = reparam_profile(p, [](double v) { return v; });
  ASSERT_EQ(same.cells.size(), p.cells.size());
  for (std::size_t i = 0; i < p.cells.size(); ++i) EXPECT_EQ(same.cells[i].rb, p.cells[i].rb);

  const auto ex = reparam_profile(p, [](double v) { return std::exp(v); });
  const auto est_ex = estimate(ex);
  ASSERT_EQ(est_ex.plausible_region.size(), est.plausible_region.size());
  for (std::size_t i = 0; i < est.plausible_region.size(); ++i) {
    EXPECT_DOUBLE_EQ(ex.cells[est_ex.plausible_region[i]].lo, std::exp(p.cells[est.plausible_region[i]].lo));
  }
  EXPECT_DOUBLE_EQ(est_ex.psi_hat, std::exp(est.psi_hat));

  const auto aff = reparam_profile(p, [](double v) { return 3.0 * v - 2.0; });
  EXPECT_DOUBLE_EQ(estimate(aff).psi_hat, 3.0 * est.psi_hat - 2.0);

  EXPECT_THROW(reparam_profile(p, [](double v) { return v * v; }), DomainError);
}

TEST(Reparam, RandomMonotoneMapsPreserveArgmaxAndPlausibleRegion) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> a(0.2, 3.0), b(-1.0, 1.0);
  const auto p = ln_profile({15, 1.0, 0.5, 1.0}, 0.1, 0.02);
  const auto est = estimate(p);
  for (int rep = 0; rep < 20; ++rep) {
    const double s = a(rng), t = b(rng), k = a(rng);
    const bool flip = rep % 2;
    auto lambda = [=](double v) {
      const double w = s * v + t + k * std::tanh(v);
      return flip ? -w : w;
    };
    const auto q = reparam_profile(p, lambda);
    const auto e = estimate(q);
    EXPECT_NEAR(e.psi_hat, lambda(est.psi_hat), 1e-12);
    EXPECT_EQ(e.plausible_region.size(), est.plausible_region.size());
    EXPECT_NEAR(e.pl_posterior_content, est.pl_posterior_content, 1e-12);
    for (auto i : e.plausible_region) EXPECT_GT(q.cells[i].rb, 1.0);
  }
}

TEST(FiniteOracle, ProfilesStrengthAndRegionsMatchEnumeration) {
  std::mt19937_64 rng(1234);
  for (int rep = 0; rep < 50; ++rep) {
    const auto spec = testsupport::random_finite_spec(rng);
    const testsupport::FiniteOracle oracle(spec);
    const auto bundle = make_finite(spec);
    const auto& model = std::get<FiniteModel>(bundle);
    for (std::size_t x = 0; x < spec.x_labels.size(); ++x) {
      const auto p = rb_profile(bundle, Outcome{spec.x_labels[x]}, std::nullopt);
      for (std::size_t k = 0; k < oracle.n_psi(); ++k) {
        const std::size_t cell = p.locate(oracle.psi_labels()[k]);
        EXPECT_NEAR(p.cells[cell].rb, oracle.rb(k, x), 1e-12);
        EXPECT_NEAR(p.cells[cell].posterior, oracle.posterior(k, x), 1e-12);
        EXPECT_NEAR(strength(p, cell), oracle.strength(k, x), 1e-12);
        // averaging over the conditional prior of theta given psi
        double avg = 0.0;
        for (std::size_t t = 0; t < model.n_theta(); ++t)
          if (model.psi_of_theta(t) == model.psi_index(oracle.psi_labels()[k]))
            avg += oracle.rb_theta(t, x) * spec.prior[t] / oracle.prior(k);
        EXPECT_NEAR(p.cells[cell].rb, avg, 1e-12);
      }
      const auto est = estimate(p);
      std::vector<std::string> pl, pl_oracle;
      for (auto i : est.plausible_region) pl.push_back(p.cells[i].label);
      for (auto k : oracle.plausible(x)) pl_oracle.push_back(oracle.psi_labels()[k]);
      std::sort(pl.begin(), pl.end());
      std::sort(pl_oracle.begin(), pl_oracle.end());
      EXPECT_EQ(pl, pl_oracle);
      for (double g : {0.1, 0.5, 0.9}) {
        const auto c = credible_region(p, g);
        std::vector<std::string> got, want;
        for (auto i : c.cells) got.push_back(p.cells[i].label);
        for (auto k : oracle.credible(x, g)) want.push_back(oracle.psi_labels()[k]);
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        EXPECT_EQ(got, want);
      }
    }
  }
}
