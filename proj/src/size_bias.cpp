#include "mallows/size_bias.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mallows/errors.hpp"
#include "mallows/exact.hpp"
#include "mallows/parallel.hpp"
#include "mallows/sampler.hpp"

namespace mallows {

namespace {

void require_move_index(const Permutation& w, std::size_t i) {
  if (i < 1 || i + 1 > w.size()) throw IndexOutOfRange("move index " + std::to_string(i) + " outside 1..n-1");
}

double sample_variance(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (const double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size() - 1);
}

}  // namespace

Permutation reverse_sort_position(const Permutation& w, std::size_t i) {
  require_move_index(w, i);
  if (w(i) > w(i + 1)) return w;
  std::vector<Permutation::value_type> values(w.values().begin(), w.values().end());
  std::swap(values[i - 1], values[i]);
  return Permutation::trusted(std::move(values));
}

Permutation reverse_sort_value(const Permutation& w, std::size_t i) {
  require_move_index(w, i);
  return inverse(reverse_sort_position(inverse(w), i));
}

Permutation apply_move(const Permutation& w, CouplingMove move) {
  return move.side == MoveSide::position ? reverse_sort_position(w, move.index) : reverse_sort_value(w, move.index);
}

CouplingMove sample_move(std::size_t n, SeededRng& rng) {
  if (n < 2) throw PreconditionViolated("the coupling needs n >= 2");
  const std::uint64_t pick = rng.below(2 * (n - 1));
  return {static_cast<std::size_t>(pick / 2) + 1, pick % 2 == 0 ? MoveSide::position : MoveSide::value};
}

Permutation sample_coupled(const Permutation& w, SeededRng& rng) { return apply_move(w, sample_move(w.size(), rng)); }

LocalDescentView::LocalDescentView(const Permutation& w) : forward_(w.size() + 1, 0), backward_(w.size() + 1, 0) {
  for (std::size_t k = 1; k <= w.size(); ++k) {
    forward_[k] = w(k);
    backward_[w(k)] = static_cast<std::uint32_t>(k);
  }
}

DescentChange LocalDescentView::swap_effect(std::vector<std::uint32_t>& arr, std::vector<std::uint32_t>& other,
                                            std::size_t i) {
  const std::size_t n = size();
  const std::uint32_t a = arr[i];
  const std::uint32_t b = arr[i + 1];
  if (a > b) return {};
  // Descent indices of arr touched by the swap, then those of the inverse,
  // where entries a and b exchange their positions.
  std::array<std::size_t, 3> near_arr{i - 1, i, i + 1};
  std::array<std::size_t, 4> near_other{a - 1u, a, b - 1u, b};
  std::sort(near_other.begin(), near_other.end());
  const auto other_end = std::unique(near_other.begin(), near_other.end());
  auto count = [&](const std::vector<std::uint32_t>& xs, auto first, auto last) {
    int total = 0;
    for (auto it = first; it != last; ++it) {
      if (*it >= 1 && *it + 1 <= n) total += xs[*it] > xs[*it + 1];
    }
    return total;
  };
  const int before_arr = count(arr, near_arr.begin(), near_arr.end());
  const int before_other = count(other, near_other.begin(), other_end);
  std::swap(arr[i], arr[i + 1]);
  other[a] = static_cast<std::uint32_t>(i + 1);
  other[b] = static_cast<std::uint32_t>(i);
  const int after_arr = count(arr, near_arr.begin(), near_arr.end());
  const int after_other = count(other, near_other.begin(), other_end);
  std::swap(arr[i], arr[i + 1]);
  other[a] = static_cast<std::uint32_t>(i);
  other[b] = static_cast<std::uint32_t>(i + 1);
  return {after_arr - before_arr, after_other - before_other};
}

DescentChange LocalDescentView::move_effect(CouplingMove move) {
  if (move.index < 1 || move.index + 1 > size()) throw IndexOutOfRange("move index outside 1..n-1");
  if (move.side == MoveSide::position) return swap_effect(forward_, backward_, move.index);
  // A value move is a position move on w^-1.
  const DescentChange c = swap_effect(backward_, forward_, move.index);
  return {c.ides, c.des};
}

DecompositionTerms decomposition(const Permutation& w) {
  const std::size_t n = w.size();
  if (n < 2) throw PreconditionViolated("the coupling needs n >= 2");
  LocalDescentView view(w);
  DecompositionTerms t;
  for (std::size_t i = 1; i < n; ++i) {
    const DescentChange pos = view.move_effect({i, MoveSide::position});
    const DescentChange val = view.move_effect({i, MoveSide::value});
    t.sigma1 -= pos.des;
    t.sigma3 -= pos.ides;
    t.sigma2 -= val.des;
    t.sigma4 -= val.ides;
  }
  t.delta_bar = (t.sigma1 + t.sigma2 + t.sigma3 + t.sigma4) / (2.0 * static_cast<double>(n - 1));
  return t;
}

double cond_exp_delta(const Permutation& w) { return decomposition(w).delta_bar; }

std::array<std::vector<int>, 4> descent_losses(const Permutation& w) {
  const std::size_t n = w.size();
  const std::size_t m = n > 0 ? n - 1 : 0;
  std::array<std::vector<int>, 4> out{std::vector<int>(m), std::vector<int>(m), std::vector<int>(m),
                                      std::vector<int>(m)};
  const auto des = static_cast<int>(descent_count(w));
  const auto ides = static_cast<int>(descent_count(inverse(w)));
  for (std::size_t i = 1; i < n; ++i) {
    const Permutation by_position = reverse_sort_position(w, i);
    const Permutation by_value = reverse_sort_value(w, i);
    out[0][i - 1] = des - static_cast<int>(descent_count(by_position));
    out[1][i - 1] = des - static_cast<int>(descent_count(by_value));
    out[2][i - 1] = ides - static_cast<int>(descent_count(inverse(by_position)));
    out[3][i - 1] = ides - static_cast<int>(descent_count(inverse(by_value)));
  }
  return out;
}

CouplingCheck exact_coupling_check(const ExactLaw& law) {
  const std::size_t n = law.n();
  if (n > 6) throw TooLargeForEnumeration("the exact coupling check is enumerated only for n <= 6");
  if (n < 2) throw PreconditionViolated("the coupling needs n >= 2");
  CouplingCheck check;
  std::map<std::uint64_t, double> law_x;
  const double move_weight = 1.0 / (2.0 * static_cast<double>(n - 1));
  for (std::size_t k = 0; k < law.permutations().size(); ++k) {
    const Permutation& w = law.permutations()[k];
    const double p = law.probabilities()[k];
    law_x[two_sided(w)] += p;
    for (std::size_t i = 1; i < n; ++i) {
      for (const MoveSide side : {MoveSide::position, MoveSide::value}) {
        check.coupled[two_sided(apply_move(w, {i, side}))] += p * move_weight;
      }
    }
  }
  double mean = 0.0;
  for (const auto& [x, p] : law_x) mean += static_cast<double>(x) * p;
  for (const auto& [x, p] : law_x) check.size_biased[x] = static_cast<double>(x) * p / mean;
  std::map<std::uint64_t, double> support = check.coupled;
  for (const auto& [x, p] : check.size_biased) support[x] += 0.0;
  for (const auto& [x, unused] : support) {
    const double a = check.coupled.count(x) ? check.coupled.at(x) : 0.0;
    const double b = check.size_biased.count(x) ? check.size_biased.at(x) : 0.0;
    check.max_deviation = std::max(check.max_deviation, std::abs(a - b));
  }
  return check;
}

VarianceTerm variance_term(const MallowsParams& params, std::size_t reps, const RngStream& stream, unsigned threads) {
  if (params.n() < 2) throw PreconditionViolated("the variance term needs n >= 2");
  if (reps < 2) throw PreconditionViolated("the variance term needs at least 2 replicates");
  std::vector<double> deltas(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    SeededRng rng = stream.at(r);
    deltas[r] = cond_exp_delta(sample_finite(params, rng));
  });
  VarianceTerm out;
  out.reps = reps;
  out.mean = std::accumulate(deltas.begin(), deltas.end(), 0.0) / static_cast<double>(reps);
  out.estimate = sample_variance(deltas, out.mean);
  // SE of a sample variance from the fourth central moment.
  double m4 = 0.0;
  for (const double d : deltas) m4 += std::pow(d - out.mean, 4);
  m4 /= static_cast<double>(reps);
  const double s2 = out.estimate;
  out.standard_error = std::sqrt(std::max(0.0, (m4 - s2 * s2 * (reps - 3.0) / (reps - 1.0)) / reps));
  const double constant = params.q() == 1.0 ? kUniformVarianceTermConstant : kVarianceTermConstant;
  out.bound = constant / static_cast<double>(params.n() - 1);
  return out;
}

double tail_bound(double x, double mu, TailSide side) {
  if (x < 0.0) throw DomainError("tail bounds need x >= 0");
  if (side == TailSide::upper) return std::exp(-x * x / (4.0 * (x / 3.0 + mu)));
  if (x >= mu) throw DomainError("the lower tail bound needs x < mu");
  return std::exp(-x * x / (4.0 * mu));
}

bool TailReport::pass() const {
  return std::all_of(points.begin(), points.end(),
                     [](const TailPoint& p) { return p.upper_pass && (!p.lower_applicable || p.lower_pass); });
}

TailReport tail_check(const MallowsParams& params, std::size_t reps, const RngStream& stream,
                      const std::vector<double>& xs, unsigned threads) {
  if (reps == 0) throw PreconditionViolated("tail_check needs reps >= 1");
  const std::vector<DescentPair> draws = draw_descent_pairs(params, reps, stream, threads);
  TailReport report;
  report.reps = reps;
  report.mu = formula_mean_two_sided(params);
  const double r = static_cast<double>(reps);
  for (const double x : xs) {
    TailPoint pt;
    pt.x = x;
    std::size_t upper = 0, lower = 0;
    for (const DescentPair& d : draws) {
      const double centered = static_cast<double>(d.two_sided()) - report.mu;
      upper += centered >= x;
      lower += centered <= -x;
    }
    pt.upper_frequency = static_cast<double>(upper) / r;
    pt.upper_se = std::sqrt(pt.upper_frequency * (1.0 - pt.upper_frequency) / r);
    pt.upper_bound = tail_bound(x, report.mu, TailSide::upper);
    pt.upper_pass = pt.upper_frequency <= pt.upper_bound + 3.0 * pt.upper_se;
    pt.lower_applicable = x < report.mu;
    pt.lower_frequency = static_cast<double>(lower) / r;
    pt.lower_se = std::sqrt(pt.lower_frequency * (1.0 - pt.lower_frequency) / r);
    if (pt.lower_applicable) {
      pt.lower_bound = tail_bound(x, report.mu, TailSide::lower);
      pt.lower_pass = pt.lower_frequency <= pt.lower_bound + 3.0 * pt.lower_se;
    }
    report.points.push_back(pt);
  }
  return report;
}

}  // namespace mallows
