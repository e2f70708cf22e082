#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "mallows/permutation.hpp"
#include "mallows/q_analog.hpp"
#include "mallows/rng.hpp"

namespace mallows {

class ExactLaw;

// Reverse sorting at positions i, i+1 (w*_i) or at values i, i+1 (w*_{-i}).
enum class MoveSide { position, value };

struct CouplingMove {
  std::size_t index = 1;
  MoveSide side = MoveSide::position;
};

// w*_i: positions i, i+1 rearranged so that the larger value comes first.
Permutation reverse_sort_position(const Permutation& w, std::size_t i);
// w*_{-i} = ((w^-1)*_i)^-1: values i and i+1 swapped when i precedes i+1.
Permutation reverse_sort_value(const Permutation& w, std::size_t i);
Permutation apply_move(const Permutation& w, CouplingMove move);

// Uniform over the 2(n-1) moves.
CouplingMove sample_move(std::size_t n, SeededRng& rng);
// w* for one uniformly chosen move; requires n >= 2.
Permutation sample_coupled(const Permutation& w, SeededRng& rng);

// Change (des(w*) - des(w), des(w*^-1) - des(w^-1)) caused by one move.
struct DescentChange {
  int des = 0;
  int ides = 0;
};

// Holds w and w^-1 side by side so the effect of a move can be read off the
// few descent indices it touches, in O(1) per move.
class LocalDescentView {
 public:
  explicit LocalDescentView(const Permutation& w);

  [[nodiscard]] std::size_t size() const { return forward_.size() - 1; }
  DescentChange move_effect(CouplingMove move);

 private:
  DescentChange swap_effect(std::vector<std::uint32_t>& arr, std::vector<std::uint32_t>& other, std::size_t i);

  // 1-based, slot 0 unused.
  std::vector<std::uint32_t> forward_;
  std::vector<std::uint32_t> backward_;
};

// Sigma_1..Sigma_4 at a fixed w, each a sum over i of a descent loss:
//   sigma1 = sum des(w)    - des(w*_i),     sigma2 = sum des(w)    - des(w*_{-i}),
//   sigma3 = sum des(w^-1) - des((w*_i)^-1), sigma4 = sum des(w^-1) - des((w*_{-i})^-1).
// delta_bar = E(X - X* | w) = (sigma1 + ... + sigma4) / (2(n - 1)).
struct DecompositionTerms {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double sigma3 = 0.0;
  double sigma4 = 0.0;
  double delta_bar = 0.0;
};

DecompositionTerms decomposition(const Permutation& w);
// E(X - X* | w), exact over all 2(n-1) moves; requires n >= 2.
double cond_exp_delta(const Permutation& w);

// Per-index losses D[k][i - 1] for the four families above, k = 0..3.
std::array<std::vector<int>, 4> descent_losses(const Permutation& w);

struct CouplingCheck {
  double max_deviation = 0.0;
  // Law of X* induced by the coupling and the size-bias target x P(X=x) / E X.
  std::map<std::uint64_t, double> coupled;
  std::map<std::uint64_t, double> size_biased;
};

// Exhaustive check of the coupling; throws TooLargeForEnumeration for n > 6.
CouplingCheck exact_coupling_check(const ExactLaw& law);

inline constexpr double kVarianceTermConstant = 6847.0;
inline constexpr double kUniformVarianceTermConstant = 148.0;

struct VarianceTerm {
  double estimate = 0.0;  // sample variance of cond_exp_delta over reps draws
  double standard_error = 0.0;
  double mean = 0.0;
  double bound = 0.0;  // 6847/(n-1), or 148/(n-1) at q = 1
  std::size_t reps = 0;
};

VarianceTerm variance_term(const MallowsParams& params, std::size_t reps, const RngStream& stream,
                           unsigned threads = 0);

enum class TailSide { upper, lower };

// Concentration bounds around mu = 2(n-1)q/(1+q):
//   upper: P(X - mu >= x)  <= exp(-x^2 / (4 (x/3 + mu))), x >= 0,
//   lower: P(X - mu <= -x) <= exp(-x^2 / (4 mu)),         0 <= x < mu.
double tail_bound(double x, double mu, TailSide side);

struct TailPoint {
  double x = 0.0;
  double upper_frequency = 0.0;
  double upper_se = 0.0;
  double upper_bound = 0.0;
  bool upper_pass = false;
  double lower_frequency = 0.0;
  double lower_se = 0.0;
  double lower_bound = 0.0;
  bool lower_applicable = false;
  bool lower_pass = false;
};

struct TailReport {
  double mu = 0.0;
  std::size_t reps = 0;
  std::vector<TailPoint> points;
  [[nodiscard]] bool pass() const;
};

TailReport tail_check(const MallowsParams& params, std::size_t reps, const RngStream& stream,
                      const std::vector<double>& xs, unsigned threads = 0);

}  // namespace mallows
