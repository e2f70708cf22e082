#include "mallows/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mallows/errors.hpp"
#include "mallows/parallel.hpp"

namespace mallows {

namespace {

constexpr std::uint32_t kInitialWindow = 64;
constexpr double kMaxRank = 0x1.0p40;

std::uint32_t draw_rank(double log_q, bool uniform, std::uint32_t m, SeededRng& rng) {
  if (uniform) return 1 + static_cast<std::uint32_t>(rng.below(m));
  const double tail = std::exp(static_cast<double>(m) * log_q);
  const double x = std::log1p(-rng.uniform() * (1.0 - tail)) / log_q;
  return static_cast<std::uint32_t>(std::clamp(std::floor(x) + 1.0, 1.0, static_cast<double>(m)));
}

Permutation sample_below_one(std::size_t n, double q, SeededRng& rng) {
  const auto size = static_cast<std::uint32_t>(n);
  OccupancyTree unused(size, true);
  std::vector<Permutation::value_type> values(n);
  const bool uniform = std::abs(1.0 - q) < kUniformFallback;
  const double log_q = std::log(q);
  for (std::uint32_t i = 0; i < size; ++i) {
    const std::uint32_t m = size - i;
    const std::uint32_t j = draw_rank(log_q, uniform, m, rng);
    const std::uint32_t value = unused.select(j);
    unused.add(value, -1);
    values[i] = value;
  }
  return Permutation::trusted(std::move(values));
}

}  // namespace

std::uint32_t truncated_geometric(double q, std::uint32_t m, SeededRng& rng) {
  if (m == 0) throw DomainError("truncated_geometric requires m >= 1");
  if (!(q > 0.0)) throw DomainError("truncated_geometric requires q > 0");
  return draw_rank(std::log(q), std::abs(1.0 - q) < kUniformFallback, m, rng);
}

std::uint64_t geometric_rank(double q, SeededRng& rng) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("geometric_rank requires 0 < q < 1");
  const double x = std::log(rng.uniform_positive()) / std::log(q);
  return static_cast<std::uint64_t>(std::min(std::floor(x) + 1.0, kMaxRank));
}

Permutation sample_finite(const MallowsParams& params, SeededRng& rng) {
  if (params.q() > 1.0) return reverse(sample_below_one(params.n(), 1.0 / params.q(), rng));
  return sample_below_one(params.n(), params.q(), rng);
}

MallowsProcess::MallowsProcess(double q) : q_(q), window_(kInitialWindow, true) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("the Mallows process requires 0 < q < 1, got " + std::to_string(q));
}

void MallowsProcess::grow_window(std::uint64_t needed) {
  std::uint64_t size = window_.size();
  while (size < needed) size *= 2;
  if (size > 0xFFFFFFFFull) throw ExcursionTooLong("Mallows process window exceeds 32-bit range");
  window_.reset(static_cast<std::uint32_t>(size), true);
  for (const std::uint64_t v : used_above_base_) window_.add(static_cast<std::uint32_t>(v - base_), -1);
}

std::uint64_t MallowsProcess::step(SeededRng& rng) {
  const std::uint64_t rank = geometric_rank(q_, rng);
  std::uint64_t value;
  if (rank <= window_.total()) {
    value = base_ + window_.select(static_cast<std::uint32_t>(rank));
  } else {
    // Every value past the window is unused.
    value = base_ + window_.size() + (rank - window_.total());
    grow_window(value - base_);
  }
  window_.add(static_cast<std::uint32_t>(value - base_), -1);
  used_above_base_.push_back(value);
  ++time_;
  max_value_ = std::max(max_value_, value);
  if (at_regeneration()) {
    base_ = time_;
    used_above_base_.clear();
    window_.reset(kInitialWindow, true);
  }
  return value;
}

std::vector<DescentPair> draw_descent_pairs(const MallowsParams& params, std::size_t reps, const RngStream& stream,
                                            unsigned threads) {
  std::vector<DescentPair> out(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    SeededRng rng = stream.at(r);
    const Permutation w = sample_finite(params, rng);
    out[r] = {static_cast<std::uint32_t>(descent_count(w)), static_cast<std::uint32_t>(descent_count(inverse(w)))};
  });
  return out;
}

ProcessPrefix sample_process_prefix(std::size_t n, double q, SeededRng& rng) {
  MallowsProcess process(q);
  ProcessPrefix prefix{{}, q};
  prefix.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) prefix.values.push_back(process.step(rng));
  return prefix;
}

Permutation relative_order(const ProcessPrefix& prefix) { return relative_order(prefix.values); }

}  // namespace mallows
