#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mallows/errors.hpp"
#include "mallows/exact.hpp"
#include "mallows/limits.hpp"
#include "mallows/stats.hpp"

using namespace mallows;

namespace {

// E h(Z) by composite Simpson's rule on [-12, 12].
double gaussian_expectation(const TestFunction& h) {
  const int steps = 24000;
  const double a = -12.0, b = 12.0, dx = (b - a) / steps;
  double sum = 0.0;
  for (int k = 0; k <= steps; ++k) {
    const double x = a + k * dx;
    const double w = (k == 0 || k == steps) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    sum += w * h(x) * std::exp(-x * x / 2.0);
  }
  return sum * dx / 3.0 / std::sqrt(2.0 * M_PI);
}

// Rough sampling noise of a Kolmogorov distance from N draws.
double ks_noise(std::size_t n) { return 0.26 / std::sqrt(static_cast<double>(n)); }

}  // namespace

TEST_CASE("statistics helpers") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-15));
  CHECK(normal_cdf(-3.0) == doctest::Approx(0.0013498980316301).epsilon(1e-13));
  CHECK(chi_square_p_value(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(chi_square_p_value(18.307038053275146, 10) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(ks_to_normal({0.0}) == 0.5);
  // Two atoms at +-1 with half the mass each: the worst gap sits at an atom.
  CHECK(ks_to_normal({-1.0, 1.0}) == doctest::Approx(0.5 - normal_cdf(-1.0)));
  CHECK(total_variation({{0, 0.5}, {1, 0.5}}, {{1, 0.5}, {2, 0.5}}) == doctest::Approx(0.5));
  CHECK(total_variation({{0, 1.0}}, {{0, 1.0}}) == 0.0);
  const auto pois = poisson_pmf(1.988);
  double total = 0.0;
  for (const double p : pois) total += p;
  CHECK(total >= 1.0 - 1e-9);
  CHECK(pois[0] == doctest::Approx(std::exp(-1.988)));
  CHECK(pois[2] == doctest::Approx(std::exp(-1.988) * 1.988 * 1.988 / 2.0));
  CHECK_THROWS_AS(poisson_pmf(0.0), DomainError);
  CHECK(sample_correlation({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0));
  CHECK(sample_variance({1, 2, 3, 4}) == doctest::Approx(5.0 / 3.0));
  const auto law = empirical_law({2, 2, 4, 0});
  CHECK(law.at(2) == 0.5);
  CHECK(chi_square_gof({50, 50}, {0.5, 0.5}).statistic == 0.0);
  CHECK(chi_square_two_sample({10, 20, 30}, {10, 20, 30}).p_value == doctest::Approx(1.0));
}

TEST_CASE("test functions") {
  for (const TestFunction& h : {TestFunction::tanh(), TestFunction::cosine()}) {
    CHECK(h.sup_norm == 1.0);
    CHECK(h.derivative_sup_norm == 1.0);
    CHECK(h.reference == doctest::Approx(gaussian_expectation(h)).epsilon(1e-10));
    double sup = 0.0, dsup = 0.0;
    for (double x = -20.0; x <= 20.0; x += 1e-3) {
      sup = std::max(sup, std::abs(h(x)));
      dsup = std::max(dsup, std::abs((h(x + 1e-6) - h(x - 1e-6)) / 2e-6));
    }
    CHECK(sup <= h.sup_norm + 1e-12);
    CHECK(dsup <= h.derivative_sup_norm + 1e-6);
  }
  CHECK(TestFunction::tanh().reference == 0.0);
  CHECK(TestFunction::cosine().reference == doctest::Approx(std::exp(-0.5)));
  CHECK(TestFunction::from_name("cos").name == "cosine");
  CHECK_THROWS_AS(TestFunction::from_name("sin"), UsageError);
}

TEST_CASE("CLT bound evaluation") {
  CHECK(clt_bound(TestFunction::tanh(), MallowsParams(100000, 1.0)) == doctest::Approx(498.0 / std::sqrt(99999.0)));
  CHECK(clt_bound(TestFunction::tanh(), MallowsParams(100000, 1.0)) == doctest::Approx(1.575).epsilon(1e-3));
  // max(q^-1/2, q^1/2) is symmetric under q -> 1/q.
  CHECK(clt_bound(TestFunction::cosine(), MallowsParams(50, 0.25)) ==
        doctest::Approx(clt_bound(TestFunction::cosine(), MallowsParams(50, 4.0))));
  CHECK(clt_bound(TestFunction::cosine(), MallowsParams(50, 0.25)) == doctest::Approx((331.0 + 167.0 * 2.0) / 7.0));
  CHECK_THROWS_AS(clt_bound(TestFunction::tanh(), MallowsParams(1, 1.0)), PreconditionViolated);
}

TEST_CASE("Kolmogorov distance shrinks with n at q = 1") {
  const std::size_t reps = 20000;
  std::vector<double> ks;
  for (const std::size_t n : {50, 200, 1000}) {
    const CltReport r = clt_experiment(MallowsParams(n, 1.0), reps, TestFunction::tanh(), RngStream{0, "ks"});
    CHECK(r.bound_holds());
    CHECK(r.exact_mean == doctest::Approx(static_cast<double>(n - 1)));
    ks.push_back(r.ks);
  }
  CHECK(ks[0] > ks[1]);
  CHECK(ks[1] > ks[2]);
  CHECK(ks[2] <= 0.05);
}

TEST_CASE("KS(n) sqrt(n) is stable across n") {
  for (const double q : {0.5, 1.0, 2.0}) {
    std::vector<double> scaled;
    for (const std::size_t n : {100, 400, 1600}) {
      const CltReport r = clt_experiment(MallowsParams(n, q), 20000, TestFunction::tanh(), RngStream{1, "scaled"});
      scaled.push_back(r.ks * std::sqrt(static_cast<double>(n)));
    }
    const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
    INFO("q = " << q << " KS sqrt(n): " << scaled[0] << " " << scaled[1] << " " << scaled[2]);
    CHECK(*hi < 3.0 * *lo);
  }
}

TEST_CASE("the standardized statistic is reflected under q -> 1/q") {
  // With a shared stream, the q > 1 draw is the reversal of the 1/q draw, so
  // X becomes 2(n-1) - X and W becomes -W.
  const RngStream stream{2, "reflect"};
  const MallowsParams sub(200, 0.5), super(200, 2.0);
  const auto a = draw_descent_pairs(sub, 3000, stream);
  const auto b = draw_descent_pairs(super, 3000, stream);
  for (std::size_t k = 0; k < a.size(); ++k) REQUIRE(a[k].two_sided() + b[k].two_sided() == 2u * 199u);
  const auto wa = standardized_two_sided(sub, a);
  const auto wb = standardized_two_sided(super, b);
  for (std::size_t k = 0; k < wa.size(); ++k) REQUIRE(wa[k] == doctest::Approx(-wb[k]).epsilon(1e-12));

  // Independent streams: KS distances agree within sampling noise.
  const std::size_t reps = 20000;
  const CltReport r1 = clt_experiment(sub, reps, TestFunction::tanh(), RngStream{3, "sym-a"});
  const CltReport r2 = clt_experiment(super, reps, TestFunction::tanh(), RngStream{3, "sym-b"});
  CHECK(std::abs(r1.ks - r2.ks) <= 3.0 * std::sqrt(2.0) * ks_noise(reps));
}

TEST_CASE("bivariate behaviour") {
  const BivariateResult uniform = bivariate_experiment(MallowsParams(1000, 1.0), 10000, RngStream{4, "biv"});
  CHECK(std::abs(uniform.sample_correlation) <= 3.0 * uniform.correlation_se);
  const BivariateResult small = bivariate_experiment(MallowsParams(1000, 0.05), 2000, RngStream{4, "biv-small"});
  CHECK(small.sample_correlation >= 0.8);
  const BivariateResult half = bivariate_experiment(MallowsParams(1000, 0.5), 10000, RngStream{4, "biv-half"});
  REQUIRE(half.projection_ks.size() == 3);
  for (const auto& [dir, ks] : half.projection_ks) {
    INFO("direction " << dir);
    CHECK(ks <= kProjectionKsTolerance);
  }
  CHECK(std::abs(half.sample_correlation) <= 1.0);
}

TEST_CASE("reference rho uses the q <-> 1/q symmetry") {
  CHECK_FALSE(reference_rho(0.9, 1000, RngStream{5, "ref"}, kDefaultMaxExcursion).has_value());
  CHECK_FALSE(reference_rho(1.0, 1000, RngStream{5, "ref"}, kDefaultMaxExcursion).has_value());
  const auto a = reference_rho(0.5, 2000, RngStream{5, "ref"}, kDefaultMaxExcursion);
  const auto b = reference_rho(2.0, 2000, RngStream{5, "ref"}, kDefaultMaxExcursion);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(a->rho == b->rho);
}

TEST_CASE("figure rows") {
  Figure1Config config;
  config.grid = {0.5, 0.9};
  config.n = 200;
  config.reps = 1000;
  config.excursion_reps = 2000;
  const auto rows = figure1(config, RngStream{6, "fig"});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].excursion_status == "ok");
  REQUIRE(rows[0].rho_excursion.has_value());
  CHECK(std::abs(rows[0].rho_finite - *rows[0].rho_excursion) <= 0.1);
  CHECK(rows[1].excursion_status == "skipped");
  CHECK_FALSE(rows[1].rho_excursion.has_value());
  const std::string csv = figure1_csv(rows);
  CHECK(csv.rfind("q,rho_finite,se_finite,rho_excursion,se_excursion,excursion_status\n", 0) == 0);
  CHECK(csv.find("\n0.9,") != std::string::npos);
  CHECK(csv.find(",,skipped\n") != std::string::npos);

  config.grid = {0.8};
  config.max_len = 5;
  const auto capped = figure1(config, RngStream{6, "fig"});
  CHECK(capped[0].excursion_status == "too_long");
  config.grid = {1.0};
  CHECK_THROWS_AS(figure1(config, RngStream{6, "fig"}), DomainError);
}

TEST_CASE("Poisson regime") {
  const MallowsParams params(500, 0.004);
  const PoissonCheck c = poisson_experiment(params, 100000, RngStream{7, "poisson"});
  CHECK(c.lambda == doctest::Approx(499.0 * 0.004 / 1.004));
  CHECK(c.lambda == doctest::Approx(1.988).epsilon(1e-3));
  CHECK(c.bound == doctest::Approx(0.096));
  CHECK_FALSE(c.vacuous);
  CHECK(c.empirical_tv >= 0.0);
  CHECK(c.empirical_tv <= 1.0);
  CHECK(c.tv_pass());
  CHECK(c.empirical_tv <= c.bound);
  CHECK(c.even_fraction >= c.even_bound);
  CHECK(c.even_pass());
  const PoissonCheck loose = poisson_experiment(MallowsParams(500, 0.1), 1000, RngStream{7, "loose"});
  CHECK(loose.vacuous);
}
