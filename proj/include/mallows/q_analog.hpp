#pragma once

#include <cstddef>
#include <string_view>

namespace mallows {

enum class Regime { sub, uniform, super };

std::string_view to_string(Regime regime);

// Size and parameter of a Mallows law on S_n.
class MallowsParams {
 public:
  // Throws DomainError unless n >= 1 and q is finite and positive.
  MallowsParams(std::size_t n, double q);

  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] double q() const { return q_; }
  [[nodiscard]] Regime regime() const;

 private:
  std::size_t n_;
  double q_;
};

// [k]_q = (1 - q^k) / (1 - q), and k at q = 1.
double q_integer(std::size_t k, double q);
// [k]_q! = [1]_q [2]_q ... [k]_q, with [0]_q! = 1.
double q_factorial(std::size_t k, double q);
// prod_{k >= 1} (1 - q^k) for 0 < q < 1, stopping once q^k < 1e-16.
double euler_product(double q);

}  // namespace mallows
