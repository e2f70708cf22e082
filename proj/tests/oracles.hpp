#pragma once

// Independent brute-force reference implementations. These deliberately
// avoid the library's algorithms: quadratic loops, std::next_permutation,
// and direct sums in long double.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "mallows/permutation.hpp"

namespace oracle {

using Line = std::vector<std::uint32_t>;

inline std::vector<Line> all_permutations(std::size_t n) {
  Line v(n);
  std::iota(v.begin(), v.end(), 1u);
  std::vector<Line> out;
  do {
    out.push_back(v);
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

inline std::uint64_t inversions(const Line& w) {
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = i + 1; j < w.size(); ++j) c += w[i] > w[j];
  return c;
}

inline Line inverse(const Line& w) {
  Line inv(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    // Find the position holding value i+1 by scanning.
    for (std::size_t j = 0; j < w.size(); ++j)
      if (w[j] == i + 1) inv[i] = static_cast<std::uint32_t>(j + 1);
  }
  return inv;
}

inline int des(const Line& w) {
  int c = 0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) c += w[i] > w[i + 1];
  return c;
}

inline int two_sided(const Line& w) { return des(w) + des(inverse(w)); }

inline mallows::Permutation perm(const Line& w) { return mallows::Permutation::from_one_line(w); }

inline Line line(const mallows::Permutation& w) { return Line(w.values().begin(), w.values().end()); }

// Mallows weights over all_permutations(n), normalized by their own sum.
struct Law {
  std::vector<Line> perms;
  std::vector<long double> prob;
  long double total = 0;
};

inline Law law(std::size_t n, double q) {
  Law l;
  l.perms = all_permutations(n);
  for (const auto& w : l.perms) {
    const long double x = std::pow(static_cast<long double>(q), static_cast<long double>(inversions(w)));
    l.prob.push_back(x);
    l.total += x;
  }
  for (auto& p : l.prob) p /= l.total;
  return l;
}

// [n]_q! as the product of geometric sums 1 + q + ... + q^(k-1).
inline long double q_factorial(std::size_t n, double q) {
  long double f = 1;
  for (std::size_t k = 1; k <= n; ++k) {
    long double s = 0, p = 1;
    for (std::size_t j = 0; j < k; ++j) {
      s += p;
      p *= q;
    }
    f *= s;
  }
  return f;
}

}  // namespace oracle
