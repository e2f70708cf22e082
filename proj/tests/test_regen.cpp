#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mallows/errors.hpp"
#include "mallows/q_analog.hpp"
#include "mallows/regen.hpp"
#include "mallows/sampler.hpp"
#include "oracles.hpp"

using namespace mallows;

namespace {

// Euler's identity oracle: prod_{k>=1} (1 - q^k) by a long product in long double.
long double euler_oracle(double q) {
  long double p = 1;
  long double qk = q;
  for (int k = 1; k < 2000; ++k) {
    p *= 1 - qk;
    qk *= q;
  }
  return p;
}

}  // namespace

TEST_CASE("stationary law") {
  const double mu0 = static_cast<double>(euler_oracle(0.5));
  CHECK(stationary_pmf(0, 0.5) == doctest::Approx(mu0).epsilon(1e-13));
  CHECK(stationary_pmf(0, 0.5) == doctest::Approx(0.2887881).epsilon(1e-7));
  CHECK(stationary_pmf(1, 0.5) == doctest::Approx(mu0).epsilon(1e-13));
  CHECK(stationary_pmf(2, 0.5) == doctest::Approx(mu0 * 0.25 / (0.5 * 0.75)).epsilon(1e-13));
  CHECK(stationary_pmf(2, 0.5) == doctest::Approx(0.1925254).epsilon(1e-6));
  for (const double q : {0.05, 0.3, 0.5, 0.8, 0.95}) {
    const auto law = stationary_law(q);
    double total = 0.0;
    for (const double p : law) total += p;
    CHECK(std::abs(total - 1.0) <= 1e-12);
    for (std::size_t j = 0; j < std::min<std::size_t>(law.size(), 30); ++j) {
      CHECK(law[j] == doctest::Approx(stationary_pmf(j, q)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(stationary_pmf(0, 1.0), DomainError);
  CHECK_THROWS_AS(stationary_pmf(0, 0.0), DomainError);
}

TEST_CASE("chain transitions") {
  CHECK(chain_step({0}, 1).m == 0);
  CHECK(chain_step({0}, 4).m == 3);
  CHECK(chain_step({5}, 2).m == 4);
  CHECK(chain_step({5}, 9).m == 8);
  CHECK_THROWS_AS(chain_step({0}, 0), PreconditionViolated);
  // Rank 1 forever keeps the chain at 0.
  ChainState s;
  for (int k = 0; k < 100; ++k) s = chain_step(s, 1);
  CHECK(s.m == 0);
}

TEST_CASE("chain occupation and Kac's formula at q = 0.5") {
  SeededRng rng(0, "chain", 0);
  const ChainRun run = simulate_chain(0.5, 1'000'000, rng);
  CHECK(occupation_distance(run, 0.5) <= 0.01);
  const double kac = 1.0 / stationary_pmf(0, 0.5);
  CHECK(kac == doctest::Approx(3.4627).epsilon(1e-4));
  CHECK(std::abs(run.mean_return_time() - kac) <= 3.0 * run.return_time_se());
}

TEST_CASE("excursion stream structure") {
  SeededRng rng(1, "stream", 0);
  ExcursionStream stream(0.6, rng);
  std::vector<Excursion> blocks;
  for (int k = 0; k < 300; ++k) blocks.push_back(stream.next());
  std::size_t total = 0;
  for (const Excursion& e : blocks) {
    REQUIRE(e.size() >= 1);
    total += e.size();
    // No proper prefix of a block is a permutation of its own length.
    std::uint32_t running_max = 0;
    for (std::size_t j = 1; j < e.size(); ++j) {
      running_max = std::max(running_max, e.block(j));
      REQUIRE(running_max > j);
    }
    if (e.size() == 1) REQUIRE(e.block == Permutation::identity(1));
  }
  CHECK(stream.time() == total);

  // The first sum of T_i process values, seen through relative order, is the
  // block-diagonal concatenation of the excursions.
  SeededRng again(1, "stream", 0);
  const ProcessPrefix prefix = sample_process_prefix(total, 0.6, again);
  const Permutation whole = relative_order(prefix);
  std::size_t offset = 0;
  std::uint64_t des_sum = 0, ides_sum = 0;
  for (const Excursion& e : blocks) {
    for (std::size_t j = 1; j <= e.size(); ++j) REQUIRE(whole(offset + j) == e.block(j) + offset);
    offset += e.size();
    if (offset < total) REQUIRE(descent_indicator(whole, offset) == 0);
    des_sum += descent_count(e.block);
    ides_sum += descent_count(inverse(e.block));
  }
  CHECK(descent_count(whole) == des_sum);
  CHECK(descent_count(inverse(whole)) == ides_sum);
}

TEST_CASE("excursion size and descent identity at q = 0.5") {
  const auto summaries = sample_excursions(0.5, 100'000, RngStream{2, "exc"});
  std::size_t ones = 0;
  for (const auto& s : summaries) ones += s.size == 1;
  const double freq = static_cast<double>(ones) / summaries.size();
  CHECK(std::abs(freq - 0.5) <= 3.0 * std::sqrt(0.25 / summaries.size()));

  const ExcursionMoments m = excursion_moments(summaries, 0.5);
  CHECK(std::abs(m.mean_x) <= 3.0 * m.se_mean_x);
  // E T0 = 1/mu_0 by Kac's formula.
  CHECK(std::abs(m.mean_T - 1.0 / stationary_pmf(0, 0.5)) <= 4.0 * m.se_mean_T);
  CHECK(m.var_x >= 0.0);
  CHECK(m.var_y >= 0.0);
  CHECK(m.count == summaries.size());
}

TEST_CASE("third moment of T0 stabilizes under doubling") {
  for (const double q : {0.5, 0.8}) {
    const auto summaries = sample_excursions(q, 40'000, RngStream{3, "moments"});
    const auto t3 = [&](std::size_t count) {
      const std::vector<ExcursionSummary> part(summaries.begin(), summaries.begin() + count);
      return excursion_moments(part, q).mean_T3;
    };
    const double a = t3(10'000), b = t3(20'000), c = t3(40'000);
    INFO("q = " << q << " T3 batch means " << a << " " << b << " " << c);
    CHECK(std::abs(b - c) <= 0.1 * c);
  }
}

TEST_CASE("renewal ratios") {
  const auto summaries = sample_excursions(0.5, 100'000, RngStream{4, "renew-exc"});
  const RenewalLimits lim = renewal_limits(summaries);
  const RenewalStats stats = renewal_stats(10'000, 0.5, 500, RngStream{4, "renew"});
  const double mean_se = std::hypot(stats.mean_ratio_se, lim.mean_ratio_se);
  CHECK(std::abs(stats.mean_ratio - lim.mean_ratio) <= 3.0 * mean_se);
  const double var_se = std::hypot(stats.var_ratio_se, lim.var_ratio_se);
  CHECK(std::abs(stats.var_ratio - lim.var_ratio) <= 4.0 * var_se);
  // The ratio E(T0^2)/E(T0)^3 differs from the variance limit by 1/E(T0).
  CHECK(lim.second_moment_ratio - lim.var_ratio == doctest::Approx(lim.mean_ratio).epsilon(1e-9));
  CHECK(std::abs(stats.var_ratio - lim.second_moment_ratio) > 4.0 * var_se);

  // As q -> 0 every step regenerates.
  const RenewalStats tiny = renewal_stats(1000, 1e-9, 10, RngStream{4, "tiny"});
  CHECK(tiny.mean_ratio == doctest::Approx(1.0));
  CHECK(tiny.var_ratio == doctest::Approx(0.0));
}

TEST_CASE("excursion estimator of rho") {
  const RhoEstimate half = estimate_rho_excursion(0.5, 20'000, RngStream{5, "rho"});
  CHECK(half.rho > 0.0);
  CHECK(half.rho < 1.0);
  CHECK(half.se > 0.0);
  CHECK(half.excursions == 20'000);
  const RhoEstimate small = estimate_rho_excursion(0.05, 20'000, RngStream{5, "rho-small"});
  CHECK(small.rho >= 0.9);
  CHECK_THROWS_AS(estimate_rho_excursion(0.5, 100, RngStream{5, "few"}), PreconditionViolated);
  CHECK_THROWS_AS(estimate_rho_excursion(0.99, 1000, RngStream{5, "long"}, 50), ExcursionTooLong);
  const RhoEstimate one = estimate_rho_excursion(0.5, 2000, RngStream{5, "det"}, kDefaultMaxExcursion, 1);
  const RhoEstimate three = estimate_rho_excursion(0.5, 2000, RngStream{5, "det"}, kDefaultMaxExcursion, 3);
  CHECK(one.rho == three.rho);
  CHECK(one.se == three.se);
}

TEST_CASE("excursion stream rejects bad parameters") {
  SeededRng rng(0, "bad", 0);
  CHECK_THROWS_AS(ExcursionStream(1.0, rng), DomainError);
  CHECK_THROWS_AS(ExcursionStream(0.5, rng, 0), PreconditionViolated);
  ExcursionStream capped(0.99, rng, 1);
  bool threw = false;
  for (int k = 0; k < 50 && !threw; ++k) {
    try {
      capped.next();
    } catch (const ExcursionTooLong&) {
      threw = true;
    }
  }
  CHECK(threw);
}
