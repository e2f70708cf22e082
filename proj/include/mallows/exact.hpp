#pragma once

#include <cstdint>
#include <vector>

#include "mallows/permutation.hpp"
#include "mallows/q_analog.hpp"

namespace mallows {

inline constexpr std::size_t kEnumerationCap = 8;
inline constexpr std::size_t kTypeSumCap = 7;

// The Mallows law on S_n, tabulated over all n! permutations in
// lexicographic order. This is the brute-force oracle for everything else.
class ExactLaw {
 public:
  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] double q() const { return q_; }
  // Sum of q^l(w) over S_n, accumulated directly.
  [[nodiscard]] double normalization() const { return normalization_; }
  [[nodiscard]] const std::vector<Permutation>& permutations() const { return perms_; }
  [[nodiscard]] const std::vector<double>& probabilities() const { return probs_; }
  [[nodiscard]] const std::vector<std::uint32_t>& lengths() const { return lengths_; }
  [[nodiscard]] std::size_t index_of(const Permutation& w) const;
  [[nodiscard]] double pmf(const Permutation& w) const { return probs_[index_of(w)]; }

  friend ExactLaw enumerate_law(const MallowsParams& params);

 private:
  std::size_t n_ = 0;
  double q_ = 1.0;
  double normalization_ = 0.0;
  std::vector<Permutation> perms_;
  std::vector<double> probs_;
  std::vector<std::uint32_t> lengths_;
};

// Throws TooLargeForEnumeration for n > 8.
ExactLaw enumerate_law(const MallowsParams& params);

// Exact expectation of f(w) under the law.
template <class F>
double expectation(const ExactLaw& law, F&& f) {
  double sum = 0.0;
  for (std::size_t k = 0; k < law.permutations().size(); ++k) sum += law.probabilities()[k] * f(law.permutations()[k]);
  return sum;
}

struct MomentSummary {
  double mean_des = 0.0;
  double mean_two_sided = 0.0;
  double var_des = 0.0;
  double var_ides = 0.0;
  double cov_des_ides = 0.0;
  double var_two_sided = 0.0;
  double rho = 0.0;  // cov_des_ides / var_des
};

MomentSummary exact_moments(const ExactLaw& law);

// E(des(w) + des(w^-1)) = 2q(n-1)/(1+q).
double formula_mean_two_sided(const MallowsParams& params);
// Var(des(w)) = [n q (1-q+q^2) - q (1-3q+q^2)] / [(1+q)^2 (1+q+q^2)], evaluated at
// min(q, 1/q). Requires n >= 2.
double formula_var_des(const MallowsParams& params);

struct CovBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Bounds on Cov(des(w), des(w^-1)) for 0 < q < 1, n >= 2:
//   lower q(n-1)(1-q)^2 prod_k(1-q^k) / (1+q),  upper q(n-1)(1-q)(1+q)^2 / (1-q^n).
CovBounds cov_bounds(const MallowsParams& params);

// Upper bound q^l(w') [n-|C|]_q! / [n]_q! on P(w(c) = a_c for c in C), where w'
// sends C to the targets and fills the other positions increasingly.
// Positions and targets are 1-based; requires q <= 1.
double prob_bound(const std::vector<std::size_t>& positions, const std::vector<std::size_t>& targets,
                  const MallowsParams& params);
// The permutation w' used by prob_bound.
Permutation minimal_completion(std::size_t n, const std::vector<std::size_t>& positions,
                               const std::vector<std::size_t>& targets);
double exact_prob_assignment(const ExactLaw& law, const std::vector<std::size_t>& positions,
                             const std::vector<std::size_t>& targets);

enum class IndependenceMode { direct, inverse };

struct IndependenceReport {
  // Probability of the conditioning event (1 in direct mode).
  double conditioning_probability = 1.0;
  // max |P(a, b) - P(a) P(b)| over the pair of induced permutations.
  double joint_deviation = 0.0;
  // max |P(a) - Mallows(a)| for each marginal.
  double first_marginal_deviation = 0.0;
  double second_marginal_deviation = 0.0;
  [[nodiscard]] double max_deviation() const;
};

// direct:  law of (w^S, w^S') for connected S, S' with |i - j| > 1.
// inverse: law of (w^S, (w^-1)^S') for connected S, S', conditional on
//          |{w(i) : i in S-bar} intersect S'-bar| == intersection_size (0 or 1).
IndependenceReport independence_check(const ExactLaw& law, const IndexSet& s, const IndexSet& s_prime,
                                      IndependenceMode mode, std::size_t intersection_size = 0);

// Bound constants for the six covariance types, in units of (n - 1).
double type_sum_constant(int type);
inline constexpr double kAdjacentPairConstant = 111.0;

// Exact double sum over i, j in [n-1] of the covariances of the given type:
//   1: Cov(des(w)-des(w*_i),    des(w)-des(w*_j))
//   2: Cov(des(w)-des(w*_i),    des(w^-1)-des((w*_j)^-1))
//   3: Cov(des(w)-des(w*_i),    des(w)-des(w*_{-j}))
//   4: Cov(des(w)-des(w*_i),    des(w^-1)-des((w*_{-j})^-1))
//   5: Cov(des(w)-des(w*_{-i}), des(w)-des(w*_{-j}))
//   6: Cov(des(w)-des(w*_{-j}), des(w^-1)-des((w*_i)^-1))
// Throws TooLargeForEnumeration for n > 7.
double type_sum(int type, const ExactLaw& law);

// sum_{i,j} P(w(i+1) - w(i) = 1 and w(j+1) - w(j) = 1).
double adjacent_pair_sum(const ExactLaw& law);

// Var E(X - X* | w), exact. Throws TooLargeForEnumeration for n > 7.
double exact_variance_term(const ExactLaw& law);

// P(|w(i) - i| > 1) for 1-based position i.
double displacement_probability(const ExactLaw& law, std::size_t i);
// P(des_i(w) = des_i(w^-1) for all i).
double descent_sets_equal_probability(const ExactLaw& law);

// Law of w^rev when w follows `law`, in the same permutation order.
std::vector<double> reversed_probabilities(const ExactLaw& law);

}  // namespace mallows
