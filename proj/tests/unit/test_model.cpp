#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "bnprdd/error.hpp"
#include "bnprdd/log.hpp"
#include "bnprdd/model.hpp"
#include "bnprdd/rng.hpp"
#include "support.hpp"

using namespace bnprdd;

namespace {

// Independent weight oracle: plain erfc, no tail-side switching.
double oracle_weight(int j, double e, double s) {
  const double a = (j - 1 - e) / s / std::sqrt(2.0);
  const double b = (j - e) / s / std::sqrt(2.0);
  if (a > 0.0) return 0.5 * (std::erfc(a) - std::erfc(b));
  return 0.5 * (std::erfc(-b) - std::erfc(-a));
}

// Smallest [lo, hi] (by width, then leftmost) with direct-sum mass >= 1 - eps.
std::pair<int, int> oracle_window(double e, double s, double eps) {
  for (int width = 0; width < 60; ++width) {
    for (int lo = static_cast<int>(std::floor(e)) - 40; lo <= static_cast<int>(std::ceil(e)) + 40; ++lo) {
      const int hi = lo + width;
      // Mass outside, summed from the tails (avoids 1 - x cancellation).
      double outside = 0.0;
      for (int j = lo - 200; j < lo; ++j) outside += oracle_weight(j, e, s);
      for (int j = hi + 1; j <= hi + 200; ++j) outside += oracle_weight(j, e, s);
      if (outside <= eps) return {lo, hi};
    }
  }
  return {0, -1};
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-12);
}

Parameters two_component() {
  Parameters p;
  p.window = ComponentWindow(0, {{-1.0, 1.0}, {1.0, 1.0}});
  p.beta = {0.0, 0.0, 0.0};
  p.lambda = {2.0 * std::log(0.1), 0.0, 0.0};
  return p;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("eta and sigma links") {
    CHECK(eta({0.0, 0.0, 0.0}, 3.7, 1) == 0.0);
    CHECK(eta({1.0, 2.0, 3.0}, 0.5, 1) == 5.0);
    CHECK(eta({1.0, 2.0, 3.0}, 0.5, 0) == 2.0);
    CHECK(sigma_link({0.0, 0.0, 0.0}, 1.0, 1) == 1.0);
    CHECK(sigma_link({std::log(4.0), 0.0, 0.0}, 0.0, 0) == doctest::Approx(2.0).epsilon(1e-15));
    const double s = sigma_link({0.0, 1.0, 1.0}, 1.0, 1);
    CHECK(s * s == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
  }

  TEST_CASE("sigma link clamps with a warning") {
    const long before = warning_count("sigma_link.clamp");
    auto old = set_warning_sink([](const std::string&) {});
    const double s = sigma_link({2000.0, 0.0, 0.0}, 0.0, 0);
    set_warning_sink(old);
    CHECK(std::isfinite(s));
    CHECK(s == doctest::Approx(std::exp(350.0)));
    CHECK(warning_count("sigma_link.clamp") == before + 1);
  }

  TEST_CASE("weights") {
    CHECK(std::fabs(weight(0, 0.0, 1.0) - 0.3413447460685429) <= 1e-15);
    CHECK(std::fabs(weight(1, 0.5, 1e-8) - 1.0) <= 1e-12);
    std::vector<double> w;
    for (int j = -5; j <= 5; ++j) w.push_back(weight(j, 0.0, 1e8));
    for (double x : w) CHECK(std::fabs(x - w[0]) <= 1e-8);
    RandomStream rng(5);
    for (int k = 0; k < 200; ++k) {
      const double e = sample_uniform(-20.0, 20.0, rng);
      const double s = std::exp(sample_uniform(std::log(1e-2), std::log(1e2), rng));
      for (int j = static_cast<int>(e) - 3; j <= static_cast<int>(e) + 3; ++j) {
        const double wj = weight(j, e, s);
        REQUIRE(wj >= 0.0);
        REQUIRE(wj <= 1.0);
        CHECK(std::fabs(wj - oracle_weight(j, e, s)) <= 1e-14);
      }
    }
  }

  TEST_CASE("active window matches the direct-summation oracle") {
    const WindowBounds w = active_window(0.0, 1.0, 1e-10);
    CHECK(w.j_min == -6);
    CHECK(w.j_max == 7);
    CHECK(window_mass(-6, 7, 0.0, 1.0) >= 1.0 - 1e-10);
    CHECK(window_mass(-5, 7, 0.0, 1.0) < 1.0 - 1e-10);
    CHECK(window_mass(-6, 6, 0.0, 1.0) < 1.0 - 1e-10);
    const auto o = oracle_window(0.0, 1.0, 1e-10);
    CHECK(o.first == -6);
    CHECK(o.second == 7);

    const WindowBounds point = active_window(0.5, 1e-9, 1e-12);
    CHECK(point.j_min == 1);
    CHECK(point.j_max == 1);

    const std::vector<double> etas{-3.0, 3.0};
    const std::vector<double> sigmas{1.0, 1.0};
    const WindowBounds both = active_window(etas, sigmas, 1e-12);
    const auto lo = oracle_window(-3.0, 1.0, 1e-12);
    const auto hi = oracle_window(3.0, 1.0, 1e-12);
    CHECK(both.j_min == lo.first);
    CHECK(both.j_max == hi.second);

    RandomStream rng(9);
    for (int k = 0; k < 15; ++k) {
      const double e = sample_uniform(-10.0, 10.0, rng);
      const double s = std::exp(sample_uniform(-3.0, 1.0, rng));
      const WindowBounds got = active_window(e, s, 1e-12);
      const auto want = oracle_window(e, s, 1e-12);
      CHECK(got.j_max - got.j_min == want.second - want.first);
      CHECK(window_mass(got.j_min, got.j_max, e, s) >= 1.0 - 1e-12);
    }
    CHECK_THROWS_AS(active_window(0.0, 1.0, 0.0), DomainError);
  }

  TEST_CASE("single component mixture") {
    const Parameters p = testing::single_component(0.0, 1.0);
    CHECK(std::fabs(mixture_density(0.0, 0.0, 0, p) - 0.3989422804014327) <= 1e-15);
    CHECK(std::fabs(mixture_quantile(0.5, 0.0, 0, p)) <= 1e-8);
    const Parameters q = testing::single_component(2.5, 0.7);
    CHECK(mixture_mean(0.3, 1, q) == 2.5);
    CHECK(mixture_variance(0.3, 1, q) == doctest::Approx(0.7).epsilon(1e-15));
  }

  TEST_CASE("two component mixture") {
    const Parameters p = two_component();
    const Mixture m = mixture_at(p, 0.0, 0);
    CHECK(m.weights()[0] == doctest::Approx(0.5).epsilon(1e-15));
    const double direct = 0.5 * normal_pdf(0.0, {-1.0, 1.0}) + 0.5 * normal_pdf(0.0, {1.0, 1.0});
    CHECK(std::fabs(mixture_density(0.0, 0.0, 0, p) - direct) <= 1e-14);
    CHECK(std::fabs(mixture_mean(0.0, 0, p)) <= 1e-15);
    CHECK(mixture_variance(0.0, 0, p) == doctest::Approx(2.0).epsilon(1e-14));
  }

  TEST_CASE("normalization, moments and quantiles against quadrature") {
    RandomStream rng(21);
    for (int k = 0; k < 20; ++k) {
      const Parameters p = testing::random_state(rng);
      const double r = sample_uniform(-1.0, 1.0, rng);
      const int t = k % 2;
      const Mixture m = mixture_at(p, r, t);
      const auto [a, b] = m.support_bracket();
      const double mass = integrate([&](double y) { return m.density(y); }, a, b);
      CHECK(std::fabs(mass - 1.0) <= 1e-6);
      const double mean = integrate([&](double y) { return y * m.density(y); }, a, b);
      const double second = integrate([&](double y) { return (y - mean) * (y - mean) * m.density(y); }, a, b);
      CHECK(std::fabs(mean - m.mean()) <= 1e-8 * std::max(1.0, std::fabs(mean)));
      CHECK(std::fabs(second - m.variance()) <= 1e-8 * std::max(1.0, second));
      double prev = 0.0;
      for (double y = a; y <= b; y += (b - a) / 200.0) {
        const double c = m.cdf(y);
        REQUIRE(c >= prev);
        prev = c;
      }
      for (double u = 0.01; u < 0.995; u += 0.01) CHECK(std::fabs(m.cdf(m.quantile(u)) - u) <= 1e-7);
    }
  }

  TEST_CASE("unimodal limit") {
    Parameters p;
    p.window = ComponentWindow(0, {{-4.0, 0.5}, {0.0, 1.0}, {3.0, 2.0}, {6.0, 0.25}});
    p.beta = {1.3, 0.0, 0.0};  // ceil(eta) = 2
    p.lambda = {2.0 * std::log(1e-8), 0.0, 0.0};
    for (double y = -5.0; y <= 10.0; y += 0.05) {
      CHECK(std::fabs(mixture_density(y, 0.0, 0, p) - normal_pdf(y, {3.0, 2.0})) <= 1e-8);
    }
  }

  TEST_CASE("discontinuity requires beta2 or lambda2") {
    RandomStream rng(4);
    Parameters p = testing::random_state(rng);
    p.beta[2] = 0.0;
    p.lambda[2] = 0.0;
    for (double y = -6.0; y <= 6.0; y += 0.25) CHECK(mixture_density(y, 0.2, 1, p) == mixture_density(y, 0.2, 0, p));
    Parameters q = testing::random_state(rng);
    q.beta[2] = 0.0;
    q.lambda[2] = 0.8;
    bool differs = false;
    for (double y = -6.0; y <= 6.0; y += 0.25) differs |= mixture_density(y, 0.2, 1, q) != mixture_density(y, 0.2, 0, q);
    CHECK(differs);
  }

  TEST_CASE("functionals") {
    const Parameters p = testing::single_component(2.0, 1.0);
    CHECK(functional_eval(FunctionalH::mean(), 0.0, 0, p) == 2.0);
    const Parameters z = testing::single_component(0.0, 1.0);
    CHECK(functional_eval(FunctionalH::survival_at(0.0), 0.0, 0, z) == 0.5);
    RandomStream rng(8);
    for (int k = 0; k < 20; ++k) {
      const Parameters s = testing::random_state(rng);
      const double y = sample_uniform(-3.0, 3.0, rng);
      const double lhs = functional_eval(FunctionalH::indicator_leq(y), 0.1, 1, s);
      const double rhs = 1.0 - functional_eval(FunctionalH::survival_at(y), 0.1, 1, s);
      CHECK(std::fabs(lhs - rhs) <= 1e-12);
    }
    CHECK_THROWS_AS(FunctionalH::quantile_at(1.0), DomainError);
  }

  TEST_CASE("functional parsing") {
    CHECK(FunctionalH::parse("mean").kind == FunctionalH::Kind::Mean);
    CHECK(FunctionalH::parse("variance").kind == FunctionalH::Kind::Variance);
    const auto q = FunctionalH::parse("quantile=0.25");
    CHECK(q.kind == FunctionalH::Kind::QuantileAt);
    CHECK(q.arg == 0.25);
    CHECK(FunctionalH::parse("cdf=-1.5").arg == -1.5);
    CHECK(FunctionalH::parse("density").arg == 0.0);
    CHECK(FunctionalH::parse("density=2").kind == FunctionalH::Kind::DensityAt);
    CHECK(FunctionalH::parse("survival=0").kind == FunctionalH::Kind::SurvivalAt);
    CHECK(FunctionalH::parse("indicator=1").kind == FunctionalH::Kind::IndicatorLeq);
    CHECK(FunctionalH::parse(FunctionalH::parse("quantile=0.1").label()).arg == 0.1);
    CHECK_THROWS_AS(FunctionalH::parse("median"), DomainError);
    CHECK_THROWS_AS(FunctionalH::parse("quantile"), DomainError);
    CHECK_THROWS_AS(FunctionalH::parse("quantile=1.5"), DomainError);
    CHECK_THROWS_AS(FunctionalH::parse("mean=2"), DomainError);
    CHECK_THROWS_AS(FunctionalH::parse("cdf=abc"), DomainError);
  }

  TEST_CASE("dataset invariants") {
    Dataset d{{1.0, 2.0, 3.0}, {-1.0, 0.5, 1.0}, {0, 1, 1}, 0.0};
    CHECK_NOTHROW(d.validate());
    CHECK(d.assignment(0) == 0);
    CHECK(d.assignment(1) == 1);
    Dataset tie{{1.0, 2.0}, {-1.0, 0.0}, {0, 1}, 0.0};
    CHECK(tie.assignment(1) == 1);
    Dataset one_side{{1.0, 2.0}, {1.0, 2.0}, {1, 1}, 0.0};
    CHECK_THROWS_AS(one_side.validate(), DataError);
    Dataset bad_t{{1.0, 2.0}, {-1.0, 1.0}, {0, 2}, 0.0};
    CHECK_THROWS_AS(bad_t.validate(), DataError);
    Dataset nan_y{{std::nan(""), 2.0}, {-1.0, 1.0}, {0, 1}, 0.0};
    CHECK_THROWS_AS(nan_y.validate(), DataError);
    Dataset tiny{{1.0}, {1.0}, {1}, 0.0};
    CHECK_THROWS_AS(tiny.validate(), DataError);
    Dataset ragged{{1.0, 2.0}, {-1.0}, {0, 1}, 0.0};
    CHECK_THROWS_AS(ragged.validate(), DataError);
    CHECK_THROWS_AS((Hyperparams{0.0, -1.0}.validate()), DomainError);
  }

  TEST_CASE("query outside the window is rejected") {
    const Parameters p = testing::single_component(0.0, 1.0);
    Parameters moved = p;
    moved.beta = {5.5, 0.0, 0.0};
    CHECK_THROWS_AS(mixture_at(moved, 0.0, 0), DomainError);
  }

  TEST_CASE("occupied components") {
    const ComponentWindow w(-1, {{0.0, 1.0}, {1.0, 1.0}, {2.0, 1.0}});
    const std::vector<int> alloc{-1, -1, 1};
    CHECK(occupied_components(w, alloc) == 2);
  }
}
