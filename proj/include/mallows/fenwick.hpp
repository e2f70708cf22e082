#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace mallows {

// Binary indexed occupancy tree over slots 1..size. Supports prefix counts
// and selection of the k-th occupied slot, both in O(log size).
class OccupancyTree {
 public:
  OccupancyTree() = default;

  // All slots start occupied when `full` is set, empty otherwise.
  explicit OccupancyTree(std::uint32_t size, bool full = false) { reset(size, full); }

  void reset(std::uint32_t size, bool full) {
    size_ = size;
    tree_.assign(static_cast<std::size_t>(size) + 1, 0);
    if (full) {
      // tree[i] covers (i - lowbit(i), i], so a full tree is just lowbit(i).
      for (std::uint32_t i = 1; i <= size; ++i) tree_[i] = i & (~i + 1);
    }
    total_ = full ? size : 0;
  }

  [[nodiscard]] std::uint32_t size() const { return size_; }
  [[nodiscard]] std::uint32_t total() const { return total_; }

  void add(std::uint32_t slot, std::int32_t delta) {
    for (; slot <= size_; slot += slot & (~slot + 1)) tree_[slot] += delta;
    total_ += delta;
  }

  // Number of occupied slots in 1..slot.
  [[nodiscard]] std::uint32_t prefix(std::uint32_t slot) const {
    std::int64_t sum = 0;
    for (; slot > 0; slot -= slot & (~slot + 1)) sum += tree_[slot];
    return static_cast<std::uint32_t>(sum);
  }

  // Slot holding the k-th occupied entry (1-based k). Requires k <= total().
  [[nodiscard]] std::uint32_t select(std::uint32_t k) const {
    std::uint32_t pos = 0;
    for (std::uint32_t step = std::bit_floor(size_ == 0 ? 1u : size_); step > 0; step >>= 1) {
      const std::uint32_t next = pos + step;
      if (next <= size_ && static_cast<std::uint32_t>(tree_[next]) < k) {
        pos = next;
        k -= static_cast<std::uint32_t>(tree_[next]);
      }
    }
    return pos + 1;
  }

 private:
  std::vector<std::int32_t> tree_;
  std::uint32_t size_ = 0;
  std::uint32_t total_ = 0;
};

}  // namespace mallows
