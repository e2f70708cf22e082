#include "mallows/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>

#include "mallows/errors.hpp"

namespace mallows {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double sample_mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = sample_mean(xs);
  double ss = 0.0;
  for (const double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

double sample_correlation(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw PreconditionViolated("correlation needs samples of equal length");
  const double mx = sample_mean(xs);
  const double my = sample_mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double ks_to_normal(std::vector<double> xs) {
  if (xs.empty()) throw PreconditionViolated("ks_to_normal needs at least one value");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double worst = 0.0;
  std::size_t k = 0;
  while (k < xs.size()) {
    std::size_t j = k;
    while (j < xs.size() && xs[j] == xs[k]) ++j;
    const double phi = normal_cdf(xs[k]);
    worst = std::max({worst, std::abs(static_cast<double>(k) / n - phi), std::abs(static_cast<double>(j) / n - phi)});
    k = j;
  }
  return worst;
}

double chi_square_p_value(double statistic, std::size_t dof) {
  if (dof == 0) return 1.0;
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(static_cast<double>(dof) / 2.0, statistic / 2.0);
}

ChiSquare chi_square_gof(const std::vector<std::uint64_t>& observed, const std::vector<double>& probabilities) {
  if (observed.size() != probabilities.size()) throw PreconditionViolated("observed and expected cell counts differ");
  const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
  std::vector<std::size_t> order(observed.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return probabilities[a] < probabilities[b]; });
  std::vector<std::pair<double, double>> cells;  // (observed, expected)
  double pooled_obs = 0.0, pooled_exp = 0.0;
  for (const std::size_t c : order) {
    pooled_obs += static_cast<double>(observed[c]);
    pooled_exp += probabilities[c] * total;
    if (pooled_exp >= 5.0) {
      cells.emplace_back(pooled_obs, pooled_exp);
      pooled_obs = pooled_exp = 0.0;
    }
  }
  if (pooled_exp > 0.0 || pooled_obs > 0.0) {
    if (cells.empty()) {
      cells.emplace_back(pooled_obs, pooled_exp);
    } else {
      cells.back().first += pooled_obs;
      cells.back().second += pooled_exp;
    }
  }
  ChiSquare out;
  for (const auto& [o, e] : cells) out.statistic += (o - e) * (o - e) / e;
  out.dof = cells.size() > 1 ? cells.size() - 1 : 0;
  out.p_value = chi_square_p_value(out.statistic, out.dof);
  return out;
}

ChiSquare chi_square_two_sample(const std::vector<std::uint64_t>& first, const std::vector<std::uint64_t>& second) {
  if (first.size() != second.size()) throw PreconditionViolated("two-sample test needs matching cells");
  std::vector<std::size_t> order(first.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return first[a] + second[a] < first[b] + second[b]; });
  std::vector<std::pair<double, double>> cells;
  double pa = 0.0, pb = 0.0;
  for (const std::size_t c : order) {
    pa += static_cast<double>(first[c]);
    pb += static_cast<double>(second[c]);
    if (pa + pb >= 10.0) {
      cells.emplace_back(pa, pb);
      pa = pb = 0.0;
    }
  }
  if (pa + pb > 0.0) {
    if (cells.empty()) {
      cells.emplace_back(pa, pb);
    } else {
      cells.back().first += pa;
      cells.back().second += pb;
    }
  }
  double na = 0.0, nb = 0.0;
  for (const auto& [a, b] : cells) {
    na += a;
    nb += b;
  }
  ChiSquare out;
  const double n = na + nb;
  for (const auto& [a, b] : cells) {
    const double row = a + b;
    const double ea = row * na / n;
    const double eb = row * nb / n;
    if (ea > 0.0) out.statistic += (a - ea) * (a - ea) / ea;
    if (eb > 0.0) out.statistic += (b - eb) * (b - eb) / eb;
  }
  out.dof = cells.size() > 1 ? cells.size() - 1 : 0;
  out.p_value = chi_square_p_value(out.statistic, out.dof);
  return out;
}

double total_variation(const DiscreteLaw& a, const DiscreteLaw& b) {
  double sum = 0.0;
  for (const auto& [x, p] : a) {
    const auto it = b.find(x);
    sum += std::abs(p - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [x, p] : b) {
    if (!a.count(x)) sum += std::abs(p);
  }
  return 0.5 * sum;
}

DiscreteLaw empirical_law(const std::vector<std::int64_t>& values) {
  DiscreteLaw law;
  if (values.empty()) return law;
  const double w = 1.0 / static_cast<double>(values.size());
  std::map<std::int64_t, std::uint64_t> counts;
  for (const auto v : values) ++counts[v];
  for (const auto& [x, c] : counts) law[x] = static_cast<double>(c) * w;
  return law;
}

std::vector<double> poisson_pmf(double lambda, double tail) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("Poisson mean must be positive");
  std::vector<double> pmf{std::exp(-lambda)};
  double mass = pmf.front();
  while (1.0 - mass >= tail) {
    const double k = static_cast<double>(pmf.size());
    pmf.push_back(pmf.back() * lambda / k);
    mass += pmf.back();
    if (pmf.back() == 0.0 && k > lambda) break;
  }
  return pmf;
}

}  // namespace mallows
