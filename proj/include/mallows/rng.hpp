#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace mallows {

// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t hash_label(std::string_view label);

// Counter-based generator. The value stream is a pure function of
// (master_seed, stream label, counter); distinct (stream, counter) pairs map
// to distinct Philox keys/counters and therefore independent streams.
class SeededRng {
 public:
  using result_type = std::uint64_t;

  SeededRng(std::uint64_t master_seed, std::string_view stream, std::uint64_t counter);

  [[nodiscard]] std::uint64_t master_seed() const { return master_seed_; }
  [[nodiscard]] std::uint64_t counter() const { return counter_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1].
  double uniform_positive();
  // Uniform integer on [0, bound), bound > 0; unbiased.
  std::uint64_t below(std::uint64_t bound);

 private:
  void refill();

  std::uint64_t master_seed_;
  std::uint64_t counter_;
  std::array<std::uint32_t, 2> key_{};
  std::uint64_t block_index_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
};

// Names one experiment's family of per-replicate streams.
struct RngStream {
  std::uint64_t seed = 0;
  std::string label;

  [[nodiscard]] SeededRng at(std::uint64_t rep) const { return SeededRng(seed, label, rep); }
  [[nodiscard]] RngStream child(std::string_view suffix) const { return {seed, label + "/" + std::string(suffix)}; }
};

}  // namespace mallows
