#pragma once

#include <cstdint>
#include <vector>

#include "mallows/fenwick.hpp"
#include "mallows/permutation.hpp"
#include "mallows/q_analog.hpp"
#include "mallows/rng.hpp"

namespace mallows {

// Below this distance from 1 the geometric rank is drawn exactly uniformly.
inline constexpr double kUniformFallback = 1e-6;

// j in [1, m] with P(j) = q^(j-1) (1 - q) / (1 - q^m), by inverse CDF.
std::uint32_t truncated_geometric(double q, std::uint32_t m, SeededRng& rng);
// k >= 1 with P(k) = q^(k-1) (1 - q); requires 0 < q < 1.
std::uint64_t geometric_rank(double q, SeededRng& rng);

// One draw from the Mallows law on S_n in O(n log n). q > 1 is served by
// drawing at 1/q and reversing.
Permutation sample_finite(const MallowsParams& params, SeededRng& rng);

// The infinite Mallows process on the positive integers, generated one value
// at a time. Each value is the k-th smallest unused integer with k geometric.
class MallowsProcess {
 public:
  // Throws DomainError unless 0 < q < 1.
  explicit MallowsProcess(double q);

  // Draws w(t + 1) and advances t.
  std::uint64_t step(SeededRng& rng);
  // Number of values drawn so far.
  [[nodiscard]] std::uint64_t time() const { return time_; }
  // True when w(1..t) is exactly {1..t}.
  [[nodiscard]] bool at_regeneration() const { return max_value_ == time_; }
  [[nodiscard]] double q() const { return q_; }

 private:
  void grow_window(std::uint64_t needed);

  double q_;
  std::uint64_t time_ = 0;
  std::uint64_t max_value_ = 0;
  // Values <= base_ are all used. Slots of window_ stand for base_ + 1 ..
  // base_ + window_.size() and are occupied while the value is unused.
  std::uint64_t base_ = 0;
  OccupancyTree window_;
  std::vector<std::uint64_t> used_above_base_;
};

struct ProcessPrefix {
  std::vector<std::uint64_t> values;
  double q = 0.0;
};

struct DescentPair {
  std::uint32_t des = 0;
  std::uint32_t ides = 0;
  [[nodiscard]] std::uint32_t two_sided() const { return des + ides; }
};

// (des(w), des(w^-1)) for reps independent draws; draw r uses stream.at(r),
// so the output does not depend on the worker count.
std::vector<DescentPair> draw_descent_pairs(const MallowsParams& params, std::size_t reps, const RngStream& stream,
                                            unsigned threads = 0);

ProcessPrefix sample_process_prefix(std::size_t n, double q, SeededRng& rng);
Permutation relative_order(const ProcessPrefix& prefix);

}  // namespace mallows
