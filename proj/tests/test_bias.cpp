#include <cmath>
#include <random>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/binomial.hpp>
#include <gtest/gtest.h>

#include "relbelief/bias.hpp"
#include "relbelief/errors.hpp"
#include "relbelief/numerics.hpp"
#include "support/finite_oracle.hpp"

using namespace relbelief;

namespace {

// P(xbar in {g >= 0}) for xbar ~ N(mu_true, sigma0^2/n), with the region
// found by a fine sign scan and bisection, not from any closed form.
template <class G>
double region_prob(const LocationNormalSpec& spec, double mu_true, G g) {
  const double sd = std::sqrt(spec.sigma0_sq / spec.n);
  const double lo = mu_true - 14.0 * sd - 20.0, hi = mu_true + 14.0 * sd + 20.0;
  const int steps = 40000;
  auto root = [&](double a, double b) {
    const bool ga = g(a) >= 0.0;
    for (int i = 0; i < 200; ++i) {
      const double m = 0.5 * (a + b);
      ((g(m) >= 0.0) == ga ? a : b) = m;
    }
    return 0.5 * (a + b);
  };
  double p = 0.0;
  double prev = lo;
  bool inside = g(lo) >= 0.0;
  double start = lo;
  for (int i = 1; i <= steps; ++i) {
    const double x = lo + (hi - lo) * i / steps;
    const bool now = g(x) >= 0.0;
    if (now != inside) {
      const double r = root(prev, x);
      if (inside) p += normal_interval_prob(start, r, mu_true, sd);
      else start = r;
      inside = now;
    }
    prev = x;
  }
  if (inside) p += normal_interval_prob(start, hi, mu_true, sd);
  return p;
}

const double kTable1[5][2] = {{0.095, 0.143}, {0.065, 0.104}, {0.044, 0.074}, {0.026, 0.045}, {0.018, 0.031}};
const double kTable2[5][2] = {{0.871, 0.631}, {0.747, 0.516}, {0.519, 0.327}, {0.125, 0.062}, {0.006, 0.002}};
const std::int64_t kN[5] = {5, 10, 20, 50, 100};
const double kMuStar[2] = {1.0, 0.0};

BiasOptions mc_options(std::uint64_t n_sim, std::uint64_t seed = 7) {
  BiasOptions o;
  o.method = Method::MonteCarlo;
  o.mc.n_sim = n_sim;
  o.mc.seed = seed;
  o.mc.threads = 4;
  return o;
}

}  // namespace

TEST(FavorProb, ClosedFormMatchesDirectRegionIntegration) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> c(-1.5, 1.5), u(0.2, 3.0);
  for (int rep = 0; rep < 25; ++rep) {
    const LocationNormalSpec spec{1 + static_cast<std::int64_t>(rng() % 60), u(rng), c(rng), u(rng)};
    LocationNormal m(spec);
    const double mu0 = c(rng), mu_true = c(rng);
    const double direct = region_prob(spec, mu_true, [&](double x) { return m.log_rb_point(x, mu0); });
    EXPECT_NEAR(favor_prob_locnormal(spec, mu0, mu_true), direct, 1e-9);
  }
}

TEST(FavorProb, CellVersionMatchesDirectRegionIntegrationAndShrinksToPoint) {
  const LocationNormalSpec spec{12, 1.5, 0.4, 0.8};
  LocationNormal m(spec);
  for (double h : {0.3, 0.1}) {
    for (double mu_true : {-0.5, 0.0, 0.7}) {
      const double direct =
          region_prob(spec, mu_true, [&](double x) { return m.rb_cell(x, -h, h) - 1.0; });
      EXPECT_NEAR(favor_prob_locnormal_cell(spec, 0.0, h, mu_true), direct, 1e-8);
    }
  }
  EXPECT_NEAR(favor_prob_locnormal_cell(spec, 0.2, 1e-4, 0.1), favor_prob_locnormal(spec, 0.2, 0.1), 1e-6);
}

TEST(FavorProb, LimitsAndKnownValue) {
  EXPECT_NEAR(favor_prob_locnormal({5, 1.0, 0.0, 1.0}, 0.0, 0.0), 1.0 - 0.143, 5e-4);
  EXPECT_LT(favor_prob_locnormal({5, 1.0, 0.0, 1.0}, 0.0, 40.0), 1e-12);
  const InferenceBundle diffuse = make_location_normal({5, 1.0, 0.0, 1e6});
  EXPECT_LT(bias_against_h(diffuse, 0.0).value, 0.01);
  EXPECT_GT(bias_in_favor_h(diffuse, 0.0, 0.5).first.value, 0.99);
}

TEST(FavorProb, FigureOneCurveIsUnimodalWithPeakAtShiftedPriorMean) {
  const LocationNormalSpec spec{20, 1.0, 1.0, 1.0};
  const int points = 201;
  std::vector<double> mu(points), f(points);
  for (int k = 0; k < points; ++k) {
    mu[k] = -3.0 + 8.0 * k / (points - 1);
    f[k] = favor_prob_locnormal(spec, 0.0, mu[k]);
  }
  const auto top = std::max_element(f.begin(), f.end()) - f.begin();
  for (int k = 1; k <= top; ++k) EXPECT_GT(f[k], f[k - 1]);
  for (int k = top + 1; k < points; ++k) EXPECT_LT(f[k], f[k - 1]);
  // stationary point of the window probability: mu = -sigma0^2 (mu* - mu0) / (n tau*^2)
  const double analytic = -1.0 / 20.0;
  EXPECT_LE(std::abs(mu[top] - analytic), 8.0 / (points - 1) + 1e-12);
  EXPECT_LE(std::abs(mu[top]), 0.05 + 1e-12);
}

TEST(BiasH, TablesOneAndTwoAndMonotoneInN) {
  for (int j = 0; j < 2; ++j) {
    double prev_a = 1.0, prev_f = 1.0;
    for (int i = 0; i < 5; ++i) {
      const auto r = bias_h(make_location_normal({kN[i], 1.0, kMuStar[j], 1.0}), 0.0, 0.5);
      EXPECT_NEAR(r.bias_against, kTable1[i][j], 0.002);
      EXPECT_NEAR(r.bias_in_favor, kTable2[i][j], 0.002);
      EXPECT_EQ(r.se_against, 0.0);
      EXPECT_EQ(r.method, Method::Exact);
      EXPECT_LT(r.bias_against, prev_a);
      EXPECT_LT(r.bias_in_favor, prev_f);
      prev_a = r.bias_against;
      prev_f = r.bias_in_favor;
    }
  }
}

TEST(BiasH, MonteCarloAgreesWithExact) {
  for (int i : {0, 2, 4}) {
    const auto b = make_location_normal({kN[i], 1.0, 1.0, 1.0});
    const auto e = bias_h(b, 0.0, 0.5);
    const auto m = bias_h(b, 0.0, 0.5, mc_options(40000));
    EXPECT_EQ(m.method, Method::MonteCarlo);
    EXPECT_NEAR(m.bias_against, e.bias_against, 3.5 * m.se_against + 1e-9);
    EXPECT_NEAR(m.bias_in_favor, e.bias_in_favor, 3.5 * m.se_in_favor + 1e-9);
  }
}

TEST(BiasH, CellHypothesisExactAgreesWithMonteCarlo) {
  const auto b = make_location_normal({10, 1.0, 0.5, 1.0});
  BiasOptions exact;
  exact.cell_half_width = 0.1;
  auto mc = mc_options(40000, 3);
  mc.cell_half_width = 0.1;
  const auto e = bias_h(b, 0.0, 0.5, exact);
  const auto m = bias_h(b, 0.0, 0.5, mc);
  EXPECT_NEAR(m.bias_against, e.bias_against, 3.5 * m.se_against);
  EXPECT_NEAR(m.bias_in_favor, e.bias_in_favor, 3.5 * m.se_in_favor);
}

TEST(BiasH, DenseSupEqualsBoundarySupForLocationNormal) {
  const auto b = make_location_normal({20, 1.0, 0.3, 1.0});
  BiasOptions dense;
  dense.monotone_boundary = false;
  const auto r1 = bias_in_favor_h(b, 0.0, 0.5);
  const auto r2 = bias_in_favor_h(b, 0.0, 0.5, dense);
  EXPECT_NEAR(r1.first.value, r2.first.value, 1e-12);
  EXPECT_DOUBLE_EQ(std::get<double>(*r1.second), std::get<double>(*r2.second));
  dense.sup_grid = {0.7, 1.0, 0.2};
  const auto r3 = bias_in_favor_h(b, 0.0, 0.5, dense);
  EXPECT_NEAR(r3.first.value, favor_prob_locnormal({20, 1.0, 0.3, 1.0}, 0.0, 0.7), 1e-15);
}

TEST(BiasH, BetaBinomialExactMatchesDensityOracleAndMonteCarlo) {
  const auto b = make_beta_binomial(30, 2.0, 3.0);
  const double psi0 = 0.35;
  boost::math::beta_distribution<double> prior(2.0, 3.0);
  auto against_oracle = [&](double truth) {
    boost::math::binomial_distribution<double> bin(30, truth);
    double p = 0.0;
    for (int s = 0; s <= 30; ++s) {
      boost::math::beta_distribution<double> post(2.0 + s, 3.0 + 30 - s);
      if (boost::math::pdf(post, psi0) <= boost::math::pdf(prior, psi0)) p += boost::math::pdf(bin, s);
    }
    return p;
  };
  const auto e = bias_h(b, psi0, 0.1);
  EXPECT_NEAR(e.bias_against, against_oracle(psi0), 1e-12);
  const auto m = bias_h(b, psi0, 0.1, mc_options(40000));
  EXPECT_NEAR(m.bias_against, e.bias_against, 3.5 * m.se_against);
  EXPECT_NEAR(m.bias_in_favor, e.bias_in_favor, 3.5 * m.se_in_favor);
  EXPECT_THROW(bias_h(b, 1.5, 0.1), DomainError);
}

TEST(BiasH, DeltaIsRequired) {
  const auto b = make_location_normal({5, 1.0, 0.0, 1.0});
  EXPECT_THROW(bias_in_favor_h(b, 0.0, 0.0), DomainError);
  EXPECT_THROW(bias_in_favor_e(b, -1.0), DomainError);
}

TEST(BiasE, TablesThreeAndFiveAndSupBound) {
  const double table3[5][2] = {{0.107, 0.193}, {0.075, 0.146}, {0.051, 0.107}, {0.031, 0.067}, {0.021, 0.046}};
  const double table5[5][2] = {{0.451, 0.798}, {0.185, 0.690}, {0.025, 0.486}, {0.000, 0.131}, {0.000, 0.009}};
  const double tau_sq[2] = {1.0, 0.25};
  const double delta[2] = {1.0, 0.5};
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 2; ++j) {
      const auto a = bias_against_e(make_location_normal({kN[i], 1.0, 0.0, tau_sq[j]}));
      EXPECT_NEAR(a.avg_bias_against, table3[i][j], 0.003);
      EXPECT_DOUBLE_EQ(a.implied_coverage, 1.0 - a.avg_bias_against);
      EXPECT_LE(a.avg_bias_against, a.sup_bias_against + 1e-6);
      EXPECT_NEAR(std::get<double>(a.sup_location), 0.0, 1e-6);
      EXPECT_FALSE(a.fallback);
      const auto f = bias_in_favor_e(make_location_normal({kN[i], 1.0, 0.0, 1.0}), delta[j]);
      EXPECT_NEAR(f.avg_bias_in_favor, table5[i][j], 0.003);
      EXPECT_FALSE(f.fallback);
    }
  }
  const auto sup5 = bias_against_e(make_location_normal({5, 1.0, 0.0, 1.0}));
  EXPECT_NEAR(sup5.sup_bias_against, 0.143, 0.0005);
}

TEST(BiasE, MonteCarloAgreesWithQuadrature) {
  for (std::int64_t n : {5, 50}) {
    const auto b = make_location_normal({n, 1.0, 0.0, 1.0});
    auto opts = mc_options(40000);
    const auto e = bias_against_e(b);
    const auto m = bias_against_e(b, opts);
    EXPECT_NEAR(m.avg_bias_against, e.avg_bias_against, 3.5 * m.se_avg_against);
    EXPECT_NEAR(m.sup_bias_against, e.sup_bias_against, 3.5 * m.se_sup_against + 0.002);
    opts.mc.n_sim = 4000;
    opts.mc.n_outer = 800;
    const auto ef = bias_in_favor_e(b, 0.5);
    const auto mf = bias_in_favor_e(b, 0.5, opts);
    EXPECT_NEAR(mf.avg_bias_in_favor, ef.avg_bias_in_favor, 3.5 * mf.se_avg_in_favor + 0.003);
  }
}

TEST(BiasE, QuadratureFailureFallsBackToMonteCarlo) {
  BiasOptions o;
  o.hermite_nodes = 2;
  o.mc.n_sim = 40000;
  const auto b = make_location_normal({5, 1.0, 0.0, 1.0});
  const auto r = bias_against_e(b, o);
  EXPECT_TRUE(r.fallback);
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_GT(r.se_avg_against, 0.0);
  EXPECT_NEAR(r.avg_bias_against, bias_against_e(b).avg_bias_against, 3.5 * r.se_avg_against);
}

TEST(BiasE, BetaBinomialUsesMonteCarlo) {
  BiasOptions o;
  o.mc.n_sim = 20000;
  o.mc.n_outer = 100;
  o.mc.threads = 4;
  const auto r = bias_e(make_beta_binomial(20, 1.0, 1.0), 0.2, o);
  EXPECT_EQ(r.method, Method::MonteCarlo);
  EXPECT_GT(r.se_avg_against, 0.0);
  EXPECT_LE(r.avg_bias_against, r.sup_bias_against + 3 * r.se_sup_against);
}

TEST(Finite, AllFourFunctionalsMatchEnumeration) {
  std::mt19937_64 rng(555);
  for (int rep = 0; rep < 50; ++rep) {
    const auto spec = testsupport::random_finite_spec(rng);
    const testsupport::FiniteOracle oracle(spec);
    const auto b = make_finite(spec);
    const double delta = 0.5;
    for (std::size_t k = 0; k < oracle.n_psi(); ++k) {
      const auto r = bias_h(b, oracle.psi_labels()[k], delta);
      EXPECT_NEAR(r.bias_against, oracle.bias_against(k), 1e-12);
      EXPECT_NEAR(r.bias_in_favor, oracle.bias_in_favor(k, delta), 1e-12);
    }
    const auto e = bias_e(b, delta);
    EXPECT_NEAR(e.avg_bias_against, oracle.avg_bias_against(), 1e-12);
    EXPECT_NEAR(e.sup_bias_against, oracle.sup_bias_against(), 1e-12);
    EXPECT_NEAR(e.avg_bias_in_favor, oracle.avg_bias_in_favor(delta), 1e-12);
  }
}

TEST(Finite, EmptyExteriorGivesZeroFavorBias) {
  const auto b = make_finite(testsupport::prosecutor_spec(100, 5));
  const auto r = bias_in_favor_h(b, std::string("guilty"), 5.0);
  EXPECT_EQ(r.first.value, 0.0);
  EXPECT_FALSE(r.second.has_value());
}

// Optimality properties of the evidence rule on random finite models, by enumeration.
class FiniteOptimality : public ::testing::Test {
 protected:
  std::mt19937_64 rng{8080};
};

TEST_F(FiniteOptimality, EvidenceInFavorIsMoreLikelyWhenTrue) {
  for (int rep = 0; rep < 50; ++rep) {
    const auto spec = testsupport::random_finite_spec(rng);
    const testsupport::FiniteOracle o(spec);
    for (std::size_t k = 0; k < o.n_psi(); ++k) {
      std::vector<std::size_t> favor;
      for (std::size_t x = 0; x < o.n_x(); ++x)
        if (o.rb(k, x) > 1.0) favor.push_back(x);
      const double when_true = o.predictive_of_set(favor, k);
      double when_false = 0.0, w = 0.0;
      for (std::size_t j = 0; j < o.n_psi(); ++j)
        if (j != k) {
          when_false += o.prior(j) * o.predictive_of_set(favor, j);
          w += o.prior(j);
        }
      EXPECT_GE(when_true, when_false / w - 1e-12);
    }
  }
}

TEST_F(FiniteOptimality, PlausibleRegionCoversTruthMoreOftenThanAnIndependentDraw) {
  for (int rep = 0; rep < 50; ++rep) {
    const auto spec = testsupport::random_finite_spec(rng);
    const testsupport::FiniteOracle o(spec);
    double true_cover = 0.0, false_cover = 0.0;
    for (std::size_t x = 0; x < o.n_x(); ++x) {
      for (auto k : o.plausible(x)) {
        true_cover += o.prior(k) * o.predictive(x, k);
        false_cover += o.marginal(x) * o.prior(k);
      }
    }
    EXPECT_GE(true_cover, false_cover - 1e-12);
  }
}

TEST_F(FiniteOptimality, NoRuleBeatsTheEvidenceRule) {
  int compared = 0;
  for (int rep = 0; rep < 30; ++rep) {
    const auto spec = testsupport::random_finite_spec(rng);
    const testsupport::FiniteOracle o(spec);
    const std::size_t nx = o.n_x();
    double family_d = 0.0, family_r = 0.0;
    for (std::size_t k = 0; k < o.n_psi(); ++k) {
      const auto r_set = o.against_set(k);
      const double r_given = o.predictive_of_set(r_set, k);
      double r_marg = 0.0, r_false = 0.0;
      for (auto x : r_set) r_marg += o.marginal(x);
      r_false = (r_marg - o.prior(k) * r_given) / (1.0 - o.prior(k));
      double best_d = 0.0;
      bool any = false;
      for (std::uint32_t mask = 0; mask < (1u << nx); ++mask) {
        std::vector<std::size_t> d;
        for (std::size_t x = 0; x < nx; ++x)
          if (mask >> x & 1u) d.push_back(x);
        const double d_given = o.predictive_of_set(d, k);
        if (d_given > r_given + 1e-14) continue;
        double d_marg = 0.0;
        for (auto x : d) d_marg += o.marginal(x);
        EXPECT_LE(d_marg, r_marg + 1e-12);
        if (std::abs(d_given - r_given) <= 1e-14) {
          const double d_false = (d_marg - o.prior(k) * d_given) / (1.0 - o.prior(k));
          EXPECT_LE(d_false, r_false + 1e-11);
        }
        if (!any || d_marg > best_d) best_d = d_marg;
        any = true;
        ++compared;
      }
      // a rule chosen per psi: the best admissible one still loses on average
      family_d += o.prior(k) * best_d;
      family_r += o.prior(k) * r_marg;
    }
    EXPECT_LE(family_d, family_r + 1e-12);
  }
  EXPECT_GT(compared, 1000);
}

TEST(Design, FindsSmallestAdmissibleSampleSize) {
  auto family = [](std::int64_t n) { return make_location_normal({n, 1.0, 0.0, 1.0}); };
  const std::vector<std::int64_t> grid{5, 10, 20, 50, 100};
  DesignTargets favor{std::nullopt, 0.07};
  const auto r = design_sample_size(family, 0.0, 0.5, favor, grid);
  EXPECT_EQ(r.n, 50);
  EXPECT_EQ(r.table.size(), 4u);
  DesignTargets against{0.05, std::nullopt};
  EXPECT_EQ(design_sample_size(family, 0.0, 0.5, against, grid).n, 50);

  EXPECT_THROW(design_sample_size(family, 0.0, 0.5, DesignTargets{0.0, std::nullopt}, grid), DomainError);
  try {
    design_sample_size(family, 0.0, 0.5, DesignTargets{1e-6, std::nullopt}, grid);
    FAIL();
  } catch (const DesignError& e) {
    EXPECT_EQ(e.table().size(), grid.size());
  }
  EXPECT_THROW(design_sample_size(family, 0.0, 0.5, favor, {10, 5}), DomainError);
}
