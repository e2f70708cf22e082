#include "mallows/q_analog.hpp"

#include <cmath>
#include <string>

#include "mallows/errors.hpp"

namespace mallows {

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::sub: return "sub";
    case Regime::uniform: return "uniform";
    case Regime::super: return "super";
  }
  return "unknown";
}

MallowsParams::MallowsParams(std::size_t n, double q) : n_(n), q_(q) {
  if (n_ < 1) throw DomainError("n must be at least 1");
  if (!std::isfinite(q_) || q_ <= 0.0) throw DomainError("q must be finite and positive, got " + std::to_string(q_));
}

Regime MallowsParams::regime() const {
  if (q_ < 1.0) return Regime::sub;
  if (q_ > 1.0) return Regime::super;
  return Regime::uniform;
}

double q_integer(std::size_t k, double q) {
  if (q == 1.0) return static_cast<double>(k);
  if (k > 64 && std::abs(1.0 - q) > 1e-3) return -std::expm1(static_cast<double>(k) * std::log(q)) / (1.0 - q);
  // Horner form 1 + q + ... + q^(k-1) avoids cancellation for q near 1.
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum = sum * q + 1.0;
  return sum;
}

double q_factorial(std::size_t k, double q) {
  double product = 1.0;
  for (std::size_t i = 1; i <= k; ++i) product *= q_integer(i, q);
  return product;
}

double euler_product(double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("euler_product requires 0 < q < 1");
  double product = 1.0;
  double power = q;
  while (power >= 1e-16) {
    product *= 1.0 - power;
    power *= q;
  }
  return product;
}

}  // namespace mallows
