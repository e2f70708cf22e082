#include "mallows/permutation.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <sstream>

#include "mallows/errors.hpp"
#include "mallows/fenwick.hpp"

namespace mallows {

Permutation Permutation::from_one_line(std::span<const value_type> values) {
  const std::size_t n = values.size();
  if (n == 0) throw NotABijection("empty permutation");
  std::vector<bool> seen(n + 1, false);
  for (const value_type v : values) {
    if (v < 1 || v > n || seen[v]) {
      throw NotABijection("values are not a permutation of 1.." + std::to_string(n));
    }
    seen[v] = true;
  }
  return Permutation(std::vector<value_type>(values.begin(), values.end()));
}

Permutation Permutation::from_one_line(std::initializer_list<value_type> values) {
  return from_one_line(std::span<const value_type>(values.begin(), values.size()));
}

Permutation Permutation::trusted(std::vector<value_type> values) { return Permutation(std::move(values)); }

Permutation Permutation::identity(std::size_t n) {
  std::vector<value_type> values(n);
  std::iota(values.begin(), values.end(), value_type{1});
  return Permutation(std::move(values));
}

std::uint64_t inversions(const Permutation& w) {
  const auto n = static_cast<std::uint32_t>(w.size());
  OccupancyTree seen(n);
  std::uint64_t count = 0;
  const auto values = w.values();
  for (std::size_t k = n; k-- > 0;) {
    count += seen.prefix(values[k] - 1);
    seen.add(values[k], 1);
  }
  return count;
}

int descent_indicator(const Permutation& w, std::size_t i) {
  if (i < 1 || i + 1 > w.size()) {
    throw IndexOutOfRange("descent index " + std::to_string(i) + " outside 1.." +
                          std::to_string(w.size() == 0 ? 0 : w.size() - 1));
  }
  return w(i) > w(i + 1) ? 1 : 0;
}

std::uint64_t descent_count(std::span<const Permutation::value_type> values) {
  std::uint64_t count = 0;
  for (std::size_t k = 1; k < values.size(); ++k) count += values[k - 1] > values[k];
  return count;
}

std::uint64_t descent_count(const Permutation& w) { return descent_count(w.values()); }

std::uint64_t two_sided(const Permutation& w) { return descent_count(w) + descent_count(inverse(w)); }

Permutation inverse(const Permutation& w) {
  const auto values = w.values();
  std::vector<Permutation::value_type> inv(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    inv[values[k] - 1] = static_cast<Permutation::value_type>(k + 1);
  }
  return Permutation::trusted(std::move(inv));
}

Permutation reverse(const Permutation& w) {
  const auto values = w.values();
  return Permutation::trusted(std::vector<Permutation::value_type>(values.rbegin(), values.rend()));
}

Permutation compose(const Permutation& outer, const Permutation& inner) {
  if (outer.size() != inner.size()) throw PreconditionViolated("compose: size mismatch");
  std::vector<Permutation::value_type> out(inner.size());
  for (std::size_t k = 1; k <= inner.size(); ++k) out[k - 1] = outer(inner(k));
  return Permutation::trusted(std::move(out));
}

Permutation relative_order(std::span<const std::uint64_t> values) {
  std::vector<std::uint32_t> order(values.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return values[a] < values[b]; });
  std::vector<Permutation::value_type> ranks(values.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (r > 0 && values[order[r]] == values[order[r - 1]]) throw NotABijection("relative_order: repeated value");
    ranks[order[r]] = static_cast<Permutation::value_type>(r + 1);
  }
  return Permutation::trusted(std::move(ranks));
}

IndexSet::IndexSet(std::size_t n, std::vector<std::size_t> members) : n_(n), members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  for (const std::size_t m : members_) {
    if (m < 1 || m + 1 > n_) throw IndexOutOfRange("index set member " + std::to_string(m) + " outside 1..n-1");
  }
  for (const std::size_t m : members_) {
    if (components_.empty() || components_.back().back() + 1 != m) components_.emplace_back();
    components_.back().push_back(m);
  }
}

std::vector<std::size_t> IndexSet::associated_indices() const {
  std::vector<std::size_t> out;
  for (const auto& comp : components_) {
    for (const std::size_t m : comp) out.push_back(m);
    out.push_back(comp.back() + 1);
  }
  return out;
}

std::vector<Permutation> induced(const Permutation& w, const IndexSet& s) {
  if (s.n() != w.size()) throw PreconditionViolated("induced: index set built for a different n");
  std::vector<Permutation> out;
  out.reserve(s.components().size());
  for (const auto& comp : s.components()) {
    std::vector<std::uint64_t> block;
    for (std::size_t k = comp.front(); k <= comp.back() + 1; ++k) block.push_back(w(k));
    out.push_back(relative_order(block));
  }
  return out;
}

std::string to_string(const Permutation& w) {
  std::ostringstream os;
  os << w;
  return os.str();
}

Permutation parse_one_line(const std::string& line) {
  std::istringstream is(line);
  std::vector<Permutation::value_type> values;
  long long v = 0;
  while (is >> v) {
    if (v < 1) throw NotABijection("non-positive value in permutation text");
    values.push_back(static_cast<Permutation::value_type>(v));
  }
  if (!is.eof()) throw NotABijection("malformed permutation text");
  return Permutation::from_one_line(values);
}

std::ostream& operator<<(std::ostream& os, const Permutation& w) {
  bool first = true;
  for (const auto v : w.values()) {
    if (!first) os << ' ';
    os << v;
    first = false;
  }
  return os;
}

}  // namespace mallows
