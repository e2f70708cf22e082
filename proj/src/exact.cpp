#include "mallows/exact.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "mallows/errors.hpp"
#include "mallows/size_bias.hpp"

namespace mallows {

namespace {

// Lexicographic rank of a permutation among all of S_n.
std::size_t lexicographic_rank(std::span<const Permutation::value_type> values) {
  const std::size_t n = values.size();
  std::size_t rank = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t smaller_later = 0;
    for (std::size_t j = i + 1; j < n; ++j) smaller_later += values[j] < values[i];
    rank = rank * (n - i) + smaller_later;
  }
  return rank;
}

std::size_t factorial(std::size_t n) {
  std::size_t f = 1;
  for (std::size_t k = 2; k <= n; ++k) f *= k;
  return f;
}

void require_type_sum_size(const ExactLaw& law) {
  if (law.n() > kTypeSumCap) {
    throw TooLargeForEnumeration("covariance type sums are enumerated only for n <= " + std::to_string(kTypeSumCap));
  }
}

}  // namespace

std::size_t ExactLaw::index_of(const Permutation& w) const {
  if (w.size() != n_) throw PreconditionViolated("permutation size does not match the law");
  return lexicographic_rank(w.values());
}

ExactLaw enumerate_law(const MallowsParams& params) {
  if (params.n() > kEnumerationCap) {
    throw TooLargeForEnumeration("exact enumeration is capped at n = " + std::to_string(kEnumerationCap) + ", got " +
                                 std::to_string(params.n()));
  }
  ExactLaw law;
  law.n_ = params.n();
  law.q_ = params.q();
  const std::size_t count = factorial(law.n_);
  law.perms_.reserve(count);
  law.lengths_.reserve(count);
  std::vector<Permutation::value_type> values(law.n_);
  std::iota(values.begin(), values.end(), Permutation::value_type{1});
  std::vector<double> weights;
  weights.reserve(count);
  do {
    Permutation w = Permutation::trusted(values);
    const auto length = static_cast<std::uint32_t>(inversions(w));
    weights.push_back(std::pow(law.q_, static_cast<double>(length)));
    law.lengths_.push_back(length);
    law.perms_.push_back(std::move(w));
  } while (std::next_permutation(values.begin(), values.end()));
  law.normalization_ = std::accumulate(weights.begin(), weights.end(), 0.0);
  law.probs_.resize(count);
  for (std::size_t k = 0; k < count; ++k) law.probs_[k] = weights[k] / law.normalization_;
  return law;
}

MomentSummary exact_moments(const ExactLaw& law) {
  double e_des = 0, e_ides = 0, e_des2 = 0, e_ides2 = 0, e_cross = 0;
  for (std::size_t k = 0; k < law.permutations().size(); ++k) {
    const Permutation& w = law.permutations()[k];
    const double p = law.probabilities()[k];
    const auto d = static_cast<double>(descent_count(w));
    const auto di = static_cast<double>(descent_count(inverse(w)));
    e_des += p * d;
    e_ides += p * di;
    e_des2 += p * d * d;
    e_ides2 += p * di * di;
    e_cross += p * d * di;
  }
  MomentSummary m;
  m.mean_des = e_des;
  m.mean_two_sided = e_des + e_ides;
  m.var_des = e_des2 - e_des * e_des;
  m.var_ides = e_ides2 - e_ides * e_ides;
  m.cov_des_ides = e_cross - e_des * e_ides;
  m.var_two_sided = m.var_des + m.var_ides + 2.0 * m.cov_des_ides;
  m.rho = m.var_des > 0.0 ? m.cov_des_ides / m.var_des : 0.0;
  return m;
}

double formula_mean_two_sided(const MallowsParams& params) {
  const double q = params.q();
  return 2.0 * q * static_cast<double>(params.n() - 1) / (1.0 + q);
}

double formula_var_des(const MallowsParams& params) {
  if (params.n() < 2) return 0.0;
  const double q = std::min(params.q(), 1.0 / params.q());
  const double n = static_cast<double>(params.n());
  const double denom = (1.0 + q) * (1.0 + q) * (1.0 + q + q * q);
  return (n * q * (1.0 - q + q * q) - q * (1.0 - 3.0 * q + q * q)) / denom;
}

CovBounds cov_bounds(const MallowsParams& params) {
  const double q = params.q();
  if (q >= 1.0) throw DomainError("covariance bounds require 0 < q < 1");
  if (params.n() < 2) throw DomainError("covariance bounds require n >= 2");
  const double m = static_cast<double>(params.n() - 1);
  CovBounds b;
  b.lower = q * m * (1.0 - q) * (1.0 - q) * euler_product(q) / (1.0 + q);
  b.upper = q * m * (1.0 - q) * (1.0 + q) * (1.0 + q) / (1.0 - std::pow(q, static_cast<double>(params.n())));
  return b;
}

Permutation minimal_completion(std::size_t n, const std::vector<std::size_t>& positions,
                               const std::vector<std::size_t>& targets) {
  if (positions.size() != targets.size()) throw PreconditionViolated("positions and targets differ in length");
  std::vector<Permutation::value_type> values(n, 0);
  std::vector<bool> value_used(n + 1, false);
  for (std::size_t k = 0; k < positions.size(); ++k) {
    const std::size_t pos = positions[k];
    const std::size_t val = targets[k];
    if (pos < 1 || pos > n || val < 1 || val > n) throw IndexOutOfRange("assignment outside 1..n");
    if (values[pos - 1] != 0 || value_used[val]) throw PreconditionViolated("assignment is not injective");
    values[pos - 1] = static_cast<Permutation::value_type>(val);
    value_used[val] = true;
  }
  Permutation::value_type next = 1;
  for (auto& v : values) {
    if (v != 0) continue;
    while (value_used[next]) ++next;
    v = next++;
  }
  return Permutation::trusted(std::move(values));
}

double prob_bound(const std::vector<std::size_t>& positions, const std::vector<std::size_t>& targets,
                  const MallowsParams& params) {
  if (params.q() > 1.0) throw DomainError("prob_bound requires q <= 1");
  const std::size_t n = params.n();
  const Permutation completion = minimal_completion(n, positions, targets);
  const double length = static_cast<double>(inversions(completion));
  return std::pow(params.q(), length) * q_factorial(n - positions.size(), params.q()) / q_factorial(n, params.q());
}

double exact_prob_assignment(const ExactLaw& law, const std::vector<std::size_t>& positions,
                             const std::vector<std::size_t>& targets) {
  minimal_completion(law.n(), positions, targets);  // validates the assignment
  return expectation(law, [&](const Permutation& w) {
    for (std::size_t k = 0; k < positions.size(); ++k) {
      if (w(positions[k]) != targets[k]) return 0.0;
    }
    return 1.0;
  });
}

double IndependenceReport::max_deviation() const {
  return std::max({joint_deviation, first_marginal_deviation, second_marginal_deviation});
}

IndependenceReport independence_check(const ExactLaw& law, const IndexSet& s, const IndexSet& s_prime,
                                      IndependenceMode mode, std::size_t intersection_size) {
  const std::size_t n = law.n();
  if (s.n() != n || s_prime.n() != n) throw PreconditionViolated("index sets built for a different n");
  if (s.empty() || s_prime.empty() || !s.connected() || !s_prime.connected()) {
    throw PreconditionViolated("independence_check needs nonempty connected index sets");
  }
  if (mode == IndependenceMode::direct) {
    for (const std::size_t i : s.members()) {
      for (const std::size_t j : s_prime.members()) {
        if ((i > j ? i - j : j - i) <= 1) throw PreconditionViolated("direct mode needs |i - j| > 1 across the sets");
      }
    }
  } else if (intersection_size > 1) {
    throw PreconditionViolated("inverse mode conditions on an intersection of size 0 or 1");
  }

  const std::size_t size_a = s.members().size() + 1;
  const std::size_t size_b = s_prime.members().size() + 1;
  const std::vector<std::size_t> bar_s = s.associated_indices();
  std::vector<bool> in_bar_s_prime(n + 1, false);
  for (const std::size_t k : s_prime.associated_indices()) in_bar_s_prime[k] = true;

  std::vector<double> joint(factorial(size_a) * factorial(size_b), 0.0);
  double event_probability = 0.0;
  for (std::size_t k = 0; k < law.permutations().size(); ++k) {
    const Permutation& w = law.permutations()[k];
    std::size_t rank_b;
    if (mode == IndependenceMode::inverse) {
      std::size_t shared = 0;
      for (const std::size_t i : bar_s) shared += in_bar_s_prime[w(i)];
      if (shared != intersection_size) continue;
      rank_b = lexicographic_rank(induced(inverse(w), s_prime).front().values());
    } else {
      rank_b = lexicographic_rank(induced(w, s_prime).front().values());
    }
    const std::size_t rank_a = lexicographic_rank(induced(w, s).front().values());
    joint[rank_a * factorial(size_b) + rank_b] += law.probabilities()[k];
    event_probability += law.probabilities()[k];
  }
  if (event_probability <= 0.0) throw PreconditionViolated("conditioning event has probability zero");
  for (double& p : joint) p /= event_probability;

  const std::size_t count_a = factorial(size_a);
  const std::size_t count_b = factorial(size_b);
  std::vector<double> marginal_a(count_a, 0.0), marginal_b(count_b, 0.0);
  for (std::size_t a = 0; a < count_a; ++a) {
    for (std::size_t b = 0; b < count_b; ++b) {
      marginal_a[a] += joint[a * count_b + b];
      marginal_b[b] += joint[a * count_b + b];
    }
  }
  IndependenceReport report;
  report.conditioning_probability = event_probability;
  for (std::size_t a = 0; a < count_a; ++a) {
    for (std::size_t b = 0; b < count_b; ++b) {
      report.joint_deviation =
          std::max(report.joint_deviation, std::abs(joint[a * count_b + b] - marginal_a[a] * marginal_b[b]));
    }
  }
  const ExactLaw small_a = enumerate_law(MallowsParams(size_a, law.q()));
  const ExactLaw small_b = enumerate_law(MallowsParams(size_b, law.q()));
  for (std::size_t a = 0; a < count_a; ++a) {
    report.first_marginal_deviation =
        std::max(report.first_marginal_deviation, std::abs(marginal_a[a] - small_a.probabilities()[a]));
  }
  for (std::size_t b = 0; b < count_b; ++b) {
    report.second_marginal_deviation =
        std::max(report.second_marginal_deviation, std::abs(marginal_b[b] - small_b.probabilities()[b]));
  }
  return report;
}

double type_sum_constant(int type) {
  switch (type) {
    case 1: return 56.0;
    case 2: return 56.0;
    case 3: return 128.0;
    case 4: return 256.0;
    case 5: return 6507.0;
    case 6: return 6507.0;
    default: throw PreconditionViolated("covariance type must be in 1..6, got " + std::to_string(type));
  }
}

double type_sum(int type, const ExactLaw& law) {
  type_sum_constant(type);  // validates the type
  require_type_sum_size(law);
  const std::size_t n = law.n();
  if (n < 2) return 0.0;
  // Loss families as returned by descent_losses: 0 -> w*_i on w, 1 -> w*_{-i} on w,
  // 2 -> w*_i on w^-1, 3 -> w*_{-i} on w^-1.
  static constexpr std::array<std::array<int, 2>, 6> kFamilies{{{0, 0}, {0, 2}, {0, 1}, {0, 3}, {1, 1}, {1, 2}}};
  const auto [left, right] = kFamilies[static_cast<std::size_t>(type - 1)];
  const std::size_t m = n - 1;
  std::vector<double> e_left(m, 0.0), e_right(m, 0.0), e_cross(m * m, 0.0);
  for (std::size_t k = 0; k < law.permutations().size(); ++k) {
    const double p = law.probabilities()[k];
    const auto losses = descent_losses(law.permutations()[k]);
    const auto& u = losses[static_cast<std::size_t>(left)];
    const auto& v = losses[static_cast<std::size_t>(right)];
    for (std::size_t i = 0; i < m; ++i) {
      e_left[i] += p * u[i];
      e_right[i] += p * v[i];
      for (std::size_t j = 0; j < m; ++j) e_cross[i * m + j] += p * u[i] * v[j];
    }
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) sum += e_cross[i * m + j] - e_left[i] * e_right[j];
  }
  return sum;
}

double adjacent_pair_sum(const ExactLaw& law) {
  return expectation(law, [](const Permutation& w) {
    double count = 0.0;
    for (std::size_t i = 1; i < w.size(); ++i) count += (w(i + 1) == w(i) + 1);
    return count * count;
  });
}

double exact_variance_term(const ExactLaw& law) {
  require_type_sum_size(law);
  if (law.n() < 2) return 0.0;
  const double scale = 1.0 / (2.0 * static_cast<double>(law.n() - 1));
  auto delta = [&](const Permutation& w) {
    const auto losses = descent_losses(w);
    double total = 0.0;
    for (const auto& family : losses) total += std::accumulate(family.begin(), family.end(), 0.0);
    return total * scale;
  };
  const double mean = expectation(law, delta);
  return expectation(law, [&](const Permutation& w) {
    const double d = delta(w) - mean;
    return d * d;
  });
}

double displacement_probability(const ExactLaw& law, std::size_t i) {
  if (i < 1 || i > law.n()) throw IndexOutOfRange("position outside 1..n");
  return expectation(law, [i](const Permutation& w) {
    const auto v = static_cast<long long>(w(i));
    return std::llabs(v - static_cast<long long>(i)) > 1 ? 1.0 : 0.0;
  });
}

double descent_sets_equal_probability(const ExactLaw& law) {
  return expectation(law, [](const Permutation& w) {
    const Permutation inv = inverse(w);
    for (std::size_t i = 1; i < w.size(); ++i) {
      if (descent_indicator(w, i) != descent_indicator(inv, i)) return 0.0;
    }
    return 1.0;
  });
}

std::vector<double> reversed_probabilities(const ExactLaw& law) {
  std::vector<double> out(law.probabilities().size(), 0.0);
  for (std::size_t k = 0; k < law.permutations().size(); ++k) {
    out[law.index_of(reverse(law.permutations()[k]))] += law.probabilities()[k];
  }
  return out;
}

}  // namespace mallows
