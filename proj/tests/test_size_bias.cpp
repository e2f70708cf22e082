#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mallows/errors.hpp"
#include "mallows/exact.hpp"
#include "mallows/sampler.hpp"
#include "mallows/size_bias.hpp"
#include "oracles.hpp"

using namespace mallows;

namespace {

Permutation P(std::initializer_list<std::uint32_t> v) { return Permutation::from_one_line(v); }

}  // namespace

TEST_CASE("reverse sorting examples") {
  CHECK(reverse_sort_position(P({1, 2, 3}), 1) == P({2, 1, 3}));
  CHECK(reverse_sort_position(P({3, 2, 5, 1, 4, 7, 6}), 2) == P({3, 5, 2, 1, 4, 7, 6}));
  CHECK(reverse_sort_position(P({3, 2, 1}), 1) == P({3, 2, 1}));
  CHECK(reverse_sort_value(P({1, 2, 3}), 1) == P({2, 1, 3}));
  CHECK(reverse_sort_value(P({3, 1, 2}), 1) == P({3, 2, 1}));
  CHECK(reverse_sort_value(P({2, 1}), 1) == P({2, 1}));
  CHECK_THROWS_AS(reverse_sort_position(P({1, 2, 3}), 3), IndexOutOfRange);
  CHECK_THROWS_AS(reverse_sort_value(P({1, 2, 3}), 0), IndexOutOfRange);
}

TEST_CASE("conditional expectation examples for n = 2") {
  CHECK(cond_exp_delta(P({2, 1})) == 0.0);
  CHECK(cond_exp_delta(P({1, 2})) == -2.0);
  SeededRng rng(0, "n2", 0);
  for (int k = 0; k < 20; ++k) CHECK(sample_coupled(P({1, 2}), rng) == P({2, 1}));
}

TEST_CASE("exhaustive move properties for n <= 7") {
  for (std::size_t n = 2; n <= 7; ++n) {
    for (const auto& line : oracle::all_permutations(n)) {
      const Permutation w = oracle::perm(line);
      const Permutation wi = inverse(w);
      LocalDescentView view(w);
      const auto losses = descent_losses(w);
      const DecompositionTerms terms = decomposition(w);
      double sums[4] = {0, 0, 0, 0};
      for (std::size_t i = 1; i < n; ++i) {
        const Permutation pos = reverse_sort_position(w, i);
        const Permutation val = reverse_sort_value(w, i);
        REQUIRE(val == inverse(reverse_sort_position(wi, i)));
        // Length grows by exactly the ascent indicator.
        REQUIRE(inversions(pos) - inversions(w) == static_cast<std::uint64_t>(line[i - 1] < line[i]));
        for (const auto& [moved, side] : {std::pair{pos, MoveSide::position}, std::pair{val, MoveSide::value}}) {
          const auto diff = static_cast<long long>(two_sided(moved)) - static_cast<long long>(two_sided(w));
          REQUIRE(diff >= -2);
          REQUIRE(diff <= 2);
          const DescentChange c = view.move_effect({i, side});
          REQUIRE(c.des == static_cast<int>(descent_count(moved)) - static_cast<int>(descent_count(w)));
          REQUIRE(c.ides == static_cast<int>(descent_count(inverse(moved))) - static_cast<int>(descent_count(wi)));
        }
        // Value moves change des(w) exactly when values i, i+1 are adjacent in increasing order.
        const bool adjacent_values = wi(i + 1) == wi(i) + 1;
        REQUIRE(losses[1][i - 1] == -static_cast<int>(adjacent_values));
        // Position moves change des(w^-1) exactly when w(i+1) = w(i) + 1.
        REQUIRE(losses[2][i - 1] == -static_cast<int>(w(i + 1) == w(i) + 1));
        for (int f = 0; f < 4; ++f) {
          REQUIRE(losses[f][i - 1] >= -1);
          REQUIRE(losses[f][i - 1] <= 2);
          sums[f] += losses[f][i - 1];
        }
      }
      REQUIRE(terms.sigma1 == sums[0]);
      REQUIRE(terms.sigma2 == sums[1]);
      REQUIRE(terms.sigma3 == sums[2]);
      REQUIRE(terms.sigma4 == sums[3]);
      REQUIRE(std::abs(terms.delta_bar) <= 2.0);
      // Oracle: average of X - X* over all 2(n-1) moves.
      double avg = 0.0;
      for (std::size_t i = 1; i < n; ++i) {
        avg += static_cast<double>(two_sided(w)) - static_cast<double>(two_sided(reverse_sort_position(w, i)));
        avg += static_cast<double>(two_sided(w)) - static_cast<double>(two_sided(reverse_sort_value(w, i)));
      }
      avg /= 2.0 * static_cast<double>(n - 1);
      REQUIRE(cond_exp_delta(w) == doctest::Approx(avg).epsilon(1e-14));
    }
  }
}

TEST_CASE("local move effects agree with recounting on large random permutations") {
  const MallowsParams params(2000, 0.9);
  for (std::size_t r = 0; r < 5; ++r) {
    SeededRng rng(3, "local", r);
    const Permutation w = sample_finite(params, rng);
    LocalDescentView view(w);
    const auto des = static_cast<int>(descent_count(w));
    const auto ides = static_cast<int>(descent_count(inverse(w)));
    for (std::size_t i = 1; i < w.size(); i += 37) {
      for (const MoveSide side : {MoveSide::position, MoveSide::value}) {
        const Permutation moved = apply_move(w, {i, side});
        const DescentChange c = view.move_effect({i, side});
        CHECK(c.des == static_cast<int>(descent_count(moved)) - des);
        CHECK(c.ides == static_cast<int>(descent_count(inverse(moved))) - ides);
      }
    }
  }
}

TEST_CASE("coupling reproduces the size-bias law exactly") {
  for (std::size_t n = 2; n <= 6; ++n) {
    for (const double q : {0.5, 1.0, 2.0}) {
      const CouplingCheck check = exact_coupling_check(enumerate_law(MallowsParams(n, q)));
      INFO("n = " << n << " q = " << q);
      CHECK(check.max_deviation <= 1e-12);
      CHECK(check.size_biased.count(0) == 1);
      CHECK(check.size_biased.at(0) == 0.0);
      CHECK(check.coupled.count(0) == 0);
    }
  }
  const CouplingCheck two = exact_coupling_check(enumerate_law(MallowsParams(2, 0.5)));
  CHECK(two.coupled.at(2) == doctest::Approx(1.0));
  const CouplingCheck three = exact_coupling_check(enumerate_law(MallowsParams(3, 1.0)));
  CHECK(three.coupled.at(2) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(three.coupled.at(4) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(exact_coupling_check(enumerate_law(MallowsParams(7, 0.5))), TooLargeForEnumeration);
}

TEST_CASE("w*_i is distributed as w conditioned on a descent at i") {
  for (std::size_t n = 2; n <= 6; ++n) {
    for (const double q : {0.5, 1.0, 2.0}) {
      const ExactLaw law = enumerate_law(MallowsParams(n, q));
      for (std::size_t i = 1; i < n; ++i) {
        std::vector<double> pushed(law.probabilities().size(), 0.0), conditioned(pushed.size(), 0.0);
        double p_descent = 0.0;
        for (std::size_t k = 0; k < pushed.size(); ++k) {
          const Permutation& w = law.permutations()[k];
          pushed[law.index_of(reverse_sort_position(w, i))] += law.probabilities()[k];
          if (descent_indicator(w, i)) {
            conditioned[k] = law.probabilities()[k];
            p_descent += law.probabilities()[k];
          }
        }
        for (std::size_t k = 0; k < pushed.size(); ++k) CHECK(std::abs(pushed[k] - conditioned[k] / p_descent) <= 1e-12);
      }
    }
  }
}

TEST_CASE("type 5 equals the covariance of adjacency indicators") {
  for (std::size_t n = 2; n <= 7; ++n) {
    for (const double q : {0.3, 1.0}) {
      const ExactLaw law = enumerate_law(MallowsParams(n, q));
      double first = 0.0;
      for (std::size_t i = 1; i < n; ++i) {
        first += expectation(law, [i](const Permutation& w) { return w(i + 1) == w(i) + 1 ? 1.0 : 0.0; });
      }
      CHECK(type_sum(5, law) == doctest::Approx(adjacent_pair_sum(law) - first * first).epsilon(1e-12));
    }
  }
}

TEST_CASE("sampled moves are uniform over the 2(n-1) choices") {
  SeededRng rng(8, "moves", 0);
  const std::size_t n = 4, draws = 60000;
  std::vector<std::uint64_t> counts(2 * (n - 1), 0);
  for (std::size_t k = 0; k < draws; ++k) {
    const CouplingMove m = sample_move(n, rng);
    REQUIRE(m.index >= 1);
    REQUIRE(m.index <= n - 1);
    ++counts[2 * (m.index - 1) + (m.side == MoveSide::value ? 1 : 0)];
  }
  const double expect = static_cast<double>(draws) / counts.size();
  for (const auto c : counts) CHECK(std::abs(static_cast<double>(c) - expect) <= 4.0 * std::sqrt(expect));
  CHECK_THROWS_AS(sample_move(1, rng), PreconditionViolated);
}

TEST_CASE("variance term: Monte Carlo against exact and against the bounds") {
  // Small n: the Monte Carlo estimate brackets the exact value.
  for (const double q : {0.5, 1.0}) {
    const MallowsParams params(6, q);
    const VarianceTerm v = variance_term(params, 20000, RngStream{1, "vterm-small"});
    const double exact = exact_variance_term(enumerate_law(params));
    CHECK(std::abs(v.estimate - exact) <= 4.0 * v.standard_error);
  }
  const VarianceTerm half = variance_term(MallowsParams(100, 0.5), 10000, RngStream{0, "vterm"});
  CHECK(half.bound == doctest::Approx(6847.0 / 99.0));
  CHECK(half.estimate <= half.bound);
  const VarianceTerm uniform = variance_term(MallowsParams(100, 1.0), 10000, RngStream{0, "vterm"});
  CHECK(uniform.bound == doctest::Approx(148.0 / 99.0));
  CHECK(uniform.estimate <= uniform.bound);
  const VarianceTerm one = variance_term(MallowsParams(100, 0.5), 1000, RngStream{0, "vterm"}, 1);
  const VarianceTerm many = variance_term(MallowsParams(100, 0.5), 1000, RngStream{0, "vterm"}, 3);
  CHECK(one.estimate == many.estimate);
}

TEST_CASE("tail bounds") {
  CHECK(tail_bound(0.0, 5.0, TailSide::upper) == 1.0);
  CHECK(tail_bound(0.0, 5.0, TailSide::lower) == 1.0);
  const double mu = 2.0 * 199.0 * 0.5 / 1.5;
  CHECK(mu == doctest::Approx(132.667).epsilon(1e-5));
  CHECK(tail_bound(20.0, mu, TailSide::upper) == doctest::Approx(std::exp(-400.0 / (4.0 * (20.0 / 3.0 + mu)))));
  CHECK(tail_bound(20.0, mu, TailSide::upper) == doctest::Approx(0.4879).epsilon(1e-4));
  CHECK(tail_bound(20.0, mu, TailSide::lower) == doctest::Approx(std::exp(-400.0 / (4.0 * mu))));
  CHECK_THROWS_AS(tail_bound(mu, mu, TailSide::lower), DomainError);
  CHECK_THROWS_AS(tail_bound(-1.0, mu, TailSide::upper), DomainError);

  const TailReport report = tail_check(MallowsParams(200, 0.5), 20000, RngStream{0, "tails"}, {0.0, 10.0, 20.0, 40.0});
  CHECK(report.mu == doctest::Approx(mu));
  CHECK(report.pass());
  REQUIRE(report.points.size() == 4);
  CHECK(report.points[2].upper_frequency <= 0.4879);
}
