#include <doctest.h>

#include <cmath>
#include <vector>

#include "bnprdd/error.hpp"
#include "bnprdd/predictive.hpp"
#include "bnprdd/sampler.hpp"
#include "support.hpp"

using namespace bnprdd;

namespace {

RegressionData toy_regression(std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed);
  RegressionData d;
  d.cutoff = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = sample_uniform(-1.0, 1.0, rng);
    const int t = r >= 0.0 ? 1 : 0;
    d.r.push_back(r);
    d.indicator.push_back(t);
    d.outcome.push_back(0.5 * t + sample_normal({0.0, 0.25}, rng));
  }
  return d;
}

// 3x3 determinant, used for Cramer's rule.
double det3(const double m[3][3]) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace

TEST_SUITE("sampler") {
  TEST_CASE("component mean conjugacy") {
    const NormalParams p = conditionals::component_mean(4, 10.0, 2.0, 1.0, 3.0);
    const double prec = 1.0 / 9.0 + 4.0 / 2.0;
    CHECK(p.variance == doctest::Approx(1.0 / prec).epsilon(1e-14));
    CHECK(p.mean == doctest::Approx((1.0 / 9.0 + 5.0) / prec).epsilon(1e-14));
    const NormalParams empty = conditionals::component_mean(0, 0.0, 2.0, 1.0, 3.0);
    CHECK(empty.mean == doctest::Approx(1.0));
    CHECK(empty.variance == doctest::Approx(9.0));
  }

  TEST_CASE("component variance conjugacy") {
    const GammaParams g = conditionals::component_variance(6, 4.5, 0.7);
    CHECK(g.shape == 4.0);
    CHECK(g.rate == doctest::Approx(2.95));
  }

  TEST_CASE("hyperparameter conditionals") {
    const std::vector<Component> comps{{1.0, 2.0}, {3.0, 0.5}, {-1.0, 4.0}};
    Hyperparams hp;
    hp.mu0 = 0.5;
    hp.sigma0_sq = 10.0;
    hp.a0 = 2.0;
    hp.b0 = 1.5;
    const NormalParams m = conditionals::mu_mu(comps, 2.0, hp);
    const double prec = 0.1 + 3.0 / 4.0;
    CHECK(m.variance == doctest::Approx(1.0 / prec));
    CHECK(m.mean == doctest::Approx((0.05 + 3.0 / 4.0) / prec));
    const GammaParams b = conditionals::b_sigma(comps, hp);
    CHECK(b.shape == 5.0);
    CHECK(b.rate == doctest::Approx(1.5 + 0.5 + 2.0 + 0.25));
  }

  TEST_CASE("beta conditional reduces to least squares") {
    const RegressionData d = toy_regression(200, 4);
    std::vector<double> z;
    RandomStream rng(2);
    for (std::size_t i = 0; i < d.size(); ++i) {
      z.push_back(1.0 + 2.0 * d.r[i] - 0.5 * d.indicator[i] + sample_normal({0.0, 0.01}, rng));
    }
    const auto g = conditionals::beta(z, d.r, d.indicator, {0.0, 0.0, 0.0}, 1e300);
    double xtx[3][3] = {};
    double xty[3] = {};
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double row[3] = {1.0, d.r[i], static_cast<double>(d.indicator[i])};
      for (int a = 0; a < 3; ++a) {
        xty[a] += row[a] * z[i];
        for (int b = 0; b < 3; ++b) xtx[a][b] += row[a] * row[b];
      }
    }
    const double det = det3(xtx);
    for (int c = 0; c < 3; ++c) {
      double m[3][3];
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) m[a][b] = b == c ? xty[a] : xtx[a][b];
      }
      CHECK(g.mean(c) == doctest::Approx(det3(m) / det).epsilon(1e-9));
    }
  }

  TEST_CASE("lambda log density differences") {
    const RegressionData d = toy_regression(50, 6);
    std::vector<double> z(d.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = d.outcome[i] * 3.0;
    const Coefficients beta{0.2, 0.1, 0.3};
    const Coefficients lambda{0.1, -0.2, 0.4};
    auto direct = [&](double l1) {
      double s = -0.5 * l1 * l1 / 50.0;
      for (std::size_t i = 0; i < z.size(); ++i) {
        const double var = std::exp(0.1 + l1 * d.r[i] + 0.4 * d.indicator[i]);
        const double e = z[i] - (0.2 + 0.1 * d.r[i] + 0.3 * d.indicator[i]);
        s += std::log(normal_pdf(e, {0.0, var}));
      }
      return s;
    };
    const double got = conditionals::lambda_log_density(0.7, 1, lambda, z, d.r, d.indicator, beta, 50.0) -
                       conditionals::lambda_log_density(-0.3, 1, lambda, z, d.r, d.indicator, beta, 50.0);
    CHECK(got == doctest::Approx(direct(0.7) - direct(-0.3)).epsilon(1e-10));
  }

  TEST_CASE("sigma_mu log density support") {
    const std::vector<Component> comps{{1.0, 1.0}};
    CHECK(std::isinf(conditionals::sigma_mu_log_density(0.0, comps, 0.0, 5.0)));
    CHECK(std::isinf(conditionals::sigma_mu_log_density(5.0, comps, 0.0, 5.0)));
    CHECK(std::isfinite(conditionals::sigma_mu_log_density(2.0, comps, 0.0, 5.0)));
  }

  TEST_CASE("schedule") {
    McmcConfig cfg;
    cfg.total_iterations = 100;
    cfg.burn_in = 20;
    cfg.thin = 5;
    CHECK(cfg.retained_per_chain() == 16);
    cfg.thin = 0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg.thin = 1;
    cfg.burn_in = 100;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
  }

  TEST_CASE("chains are reproducible and the state stays coherent") {
    const RegressionData d = toy_regression(120, 8);
    McmcConfig cfg;
    cfg.total_iterations = 100;
    cfg.burn_in = 20;
    cfg.thin = 5;
    cfg.seed = 17;
    const PosteriorDraws a = run_chain(d, {}, cfg);
    const PosteriorDraws b = run_chain(d, {}, cfg);
    REQUIRE(a.size() == 16);
    REQUIRE(b.size() == 16);
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a.draws[k].params.beta == b.draws[k].params.beta);
      CHECK(a.draws[k].params.lambda == b.draws[k].params.lambda);
      CHECK(a.draws[k].params.mu_mu == b.draws[k].params.mu_mu);
    }
    cfg.seed = 18;
    const PosteriorDraws c = run_chain(d, {}, cfg);
    CHECK(c.draws.back().params.beta != a.draws.back().params.beta);

    GibbsSampler sampler(d, {});
    RandomStream rng(5);
    ParameterState s = sampler.initial_state(rng);
    for (int it = 0; it < 50; ++it) {
      sampler.sweep(s, rng);
      REQUIRE_NOTHROW(s.validate(sampler.hyperparams()));
      for (std::size_t i = 0; i < d.size(); ++i) REQUIRE(mixture_at(s.params, d.r[i], d.indicator[i]).mass() >= 1.0 - 1e-6);
      for (int t : {0, 1}) REQUIRE(mixture_at(s.params, d.cutoff, t).mass() >= 1.0 - 1e-6);
    }
  }

  TEST_CASE("multiple chains") {
    const RegressionData d = toy_regression(80, 2);
    McmcConfig cfg;
    cfg.total_iterations = 40;
    cfg.burn_in = 10;
    cfg.thin = 2;
    cfg.chains = 3;
    const PosteriorDraws p = run_chain(d, {}, cfg);
    REQUIRE(p.size() == 45);
    CHECK(p.draws[0].chain == 0);
    CHECK(p.draws[44].chain == 2);
    cfg.chains = 1;
    const PosteriorDraws one = run_chain(d, {}, cfg);
    for (std::size_t k = 0; k < one.size(); ++k) CHECK(one.draws[k].params.beta == p.draws[k].params.beta);
  }

  TEST_CASE("binary model recovers the treatment probability jump") {
    RandomStream rng(12);
    RegressionData d;
    d.kind = ModelKind::Binary;
    for (int i = 0; i < 800; ++i) {
      const double r = sample_uniform(-1.0, 1.0, rng);
      const int a = r >= 0.0 ? 1 : 0;
      const double p = a ? 0.9 : 0.2;
      d.r.push_back(r);
      d.indicator.push_back(a);
      d.outcome.push_back(rng.uniform() < p ? 1.0 : 0.0);
    }
    McmcConfig cfg;
    cfg.total_iterations = 3000;
    cfg.burn_in = 1000;
    cfg.thin = 4;
    cfg.seed = 3;
    const PosteriorDraws draws = run_chain(d, {}, cfg);
    const PosteriorMoments p1 = treatment_probability(draws, 0.0, 1);
    const PosteriorMoments p0 = treatment_probability(draws, 0.0, 0);
    CHECK(p1.mean == doctest::Approx(0.9).epsilon(0.1));
    CHECK(p0.mean == doctest::Approx(0.2).epsilon(0.5));
    CHECK(p1.mean - p0.mean == doctest::Approx(0.7).epsilon(0.15));
  }

  TEST_CASE("regression data validation") {
    RegressionData d = toy_regression(20, 1);
    d.kind = ModelKind::Binary;
    CHECK_THROWS_AS(d.validate(), DataError);
  }
}
