#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mallows {

// A permutation of {1..n} in one-line notation: values()[i] = w(i + 1).
// Positions in the public API are 1-based, matching the one-line notation.
class Permutation {
 public:
  using value_type = std::uint32_t;

  // Validating constructor; throws NotABijection.
  static Permutation from_one_line(std::span<const value_type> values);
  static Permutation from_one_line(std::initializer_list<value_type> values);
  // Skips validation. Callers guarantee that values is a bijection of 1..n.
  static Permutation trusted(std::vector<value_type> values);
  static Permutation identity(std::size_t n);

  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] std::span<const value_type> values() const { return values_; }
  // w(position), 1-based.
  [[nodiscard]] value_type operator()(std::size_t position) const { return values_[position - 1]; }

  bool operator==(const Permutation&) const = default;
  auto operator<=>(const Permutation&) const = default;

 private:
  explicit Permutation(std::vector<value_type> values) : values_(std::move(values)) {}
  std::vector<value_type> values_;
};

// Number of pairs i < j with w(i) > w(j), in O(n log n).
std::uint64_t inversions(const Permutation& w);

// 1 iff w(i) > w(i + 1); throws IndexOutOfRange unless 1 <= i <= n - 1.
int descent_indicator(const Permutation& w, std::size_t i);
std::uint64_t descent_count(const Permutation& w);
std::uint64_t descent_count(std::span<const Permutation::value_type> values);
// des(w) + des(w^-1).
std::uint64_t two_sided(const Permutation& w);

Permutation inverse(const Permutation& w);
// w^rev(i) = w(n - i + 1).
Permutation reverse(const Permutation& w);
Permutation compose(const Permutation& outer, const Permutation& inner);

// Relative order of an injective sequence of positive integers, as a
// permutation of {1..values.size()}.
Permutation relative_order(std::span<const std::uint64_t> values);

// A subset S of adjacent-transposition indices {1..n-1}.
class IndexSet {
 public:
  // Members are deduplicated and sorted. Throws IndexOutOfRange if a member
  // is outside 1..n-1.
  IndexSet(std::size_t n, std::vector<std::size_t> members);

  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] const std::vector<std::size_t>& members() const { return members_; }
  [[nodiscard]] bool empty() const { return members_.empty(); }
  [[nodiscard]] bool connected() const { return components_.size() <= 1; }
  // Maximal runs of consecutive members.
  [[nodiscard]] const std::vector<std::vector<std::size_t>>& components() const { return components_; }
  // S-bar = {k in 1..n : k in S or k - 1 in S}.
  [[nodiscard]] std::vector<std::size_t> associated_indices() const;

 private:
  std::size_t n_;
  std::vector<std::size_t> members_;
  std::vector<std::vector<std::size_t>> components_;
};

// w^S: one permutation of size |component| + 1 per connected component of S,
// giving the relative order of w on that component's associated indices.
std::vector<Permutation> induced(const Permutation& w, const IndexSet& s);

// Text format: space-separated values on one line.
std::string to_string(const Permutation& w);
Permutation parse_one_line(const std::string& line);
std::ostream& operator<<(std::ostream& os, const Permutation& w);

}  // namespace mallows
