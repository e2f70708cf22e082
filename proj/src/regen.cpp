#include "mallows/regen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mallows/errors.hpp"
#include "mallows/parallel.hpp"
#include "mallows/q_analog.hpp"

namespace mallows {

namespace {

void require_sub_unit(double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("the Mallows process needs 0 < q < 1, got " + std::to_string(q));
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (const double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

// Sample variance and the standard error of that variance.
std::pair<double, double> variance_with_se(const std::vector<double>& xs) {
  const double r = static_cast<double>(xs.size());
  if (xs.size() < 2) return {0.0, 0.0};
  const double m = mean_of(xs);
  double s2 = 0.0, m4 = 0.0;
  for (const double x : xs) {
    const double d = (x - m) * (x - m);
    s2 += d;
    m4 += d * d;
  }
  s2 /= r - 1.0;
  m4 /= r;
  return {s2, std::sqrt(std::max(0.0, (m4 - s2 * s2 * (r - 3.0) / (r - 1.0)) / r))};
}

}  // namespace

ExcursionStream::ExcursionStream(double q, SeededRng rng, std::uint64_t max_len)
    : process_(q), rng_(std::move(rng)), max_len_(max_len) {
  if (max_len == 0) throw PreconditionViolated("max_len must be at least 1");
}

Excursion ExcursionStream::next() {
  const std::uint64_t start = process_.time();
  scratch_.clear();
  do {
    if (scratch_.size() >= max_len_) {
      throw ExcursionTooLong("excursion exceeded max_len = " + std::to_string(max_len_) + " at q = " +
                             std::to_string(process_.q()));
    }
    scratch_.push_back(static_cast<Permutation::value_type>(process_.step(rng_) - start));
  } while (!process_.at_regeneration());
  return {Permutation::trusted(scratch_)};
}

double stationary_pmf(std::size_t j, double q) {
  require_sub_unit(q);
  double p = euler_product(q);
  for (std::size_t k = 1; k <= j && p > 0.0; ++k) p *= q / -std::expm1(static_cast<double>(k) * std::log(q));
  return p;
}

std::vector<double> stationary_law(double q) {
  require_sub_unit(q);
  std::vector<double> law{euler_product(q)};
  double mass = law.front();
  while (1.0 - mass >= 1e-15 && law.back() > 0.0) {
    const double k = static_cast<double>(law.size());
    law.push_back(law.back() * q / -std::expm1(k * std::log(q)));
    mass += law.back();
  }
  return law;
}

ChainState chain_step(ChainState state, std::uint64_t z) {
  if (z == 0) throw PreconditionViolated("chain ranks start at 1");
  return {std::max(state.m, z) - 1};
}

std::vector<double> ChainRun::frequencies() const {
  std::vector<double> f(occupation.size());
  for (std::size_t m = 0; m < f.size(); ++m) f[m] = static_cast<double>(occupation[m]) / static_cast<double>(steps);
  return f;
}

double ChainRun::mean_return_time() const {
  if (return_times.empty()) return 0.0;
  double s = 0.0;
  for (const auto t : return_times) s += static_cast<double>(t);
  return s / static_cast<double>(return_times.size());
}

double ChainRun::return_time_se() const {
  std::vector<double> xs(return_times.begin(), return_times.end());
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (const double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

ChainRun simulate_chain(double q, std::uint64_t steps, SeededRng& rng) {
  require_sub_unit(q);
  ChainRun run;
  run.steps = steps;
  ChainState state;
  std::uint64_t last_zero = 0;
  for (std::uint64_t t = 1; t <= steps; ++t) {
    state = chain_step(state, geometric_rank(q, rng));
    if (state.m >= run.occupation.size()) run.occupation.resize(state.m + 1, 0);
    ++run.occupation[state.m];
    if (state.m == 0) {
      run.return_times.push_back(t - last_zero);
      last_zero = t;
    }
  }
  return run;
}

double occupation_distance(const ChainRun& run, double q) {
  const std::vector<double> law = stationary_law(q);
  const std::vector<double> freq = run.frequencies();
  double diff = 0.0;
  double law_mass = 0.0;
  for (std::size_t m = 0; m < std::max(law.size(), freq.size()); ++m) {
    const double a = m < freq.size() ? freq[m] : 0.0;
    const double b = m < law.size() ? law[m] : 0.0;
    law_mass += b;
    diff += std::abs(a - b);
  }
  return 0.5 * (diff + std::max(0.0, 1.0 - law_mass));
}

std::vector<ExcursionSummary> sample_excursions(double q, std::size_t count, const RngStream& stream,
                                                std::uint64_t max_len, unsigned threads) {
  require_sub_unit(q);
  std::vector<ExcursionSummary> out(count);
  parallel_for(count, threads, [&](std::size_t k) {
    ExcursionStream excursions(q, stream.at(k), max_len);
    const Excursion e = excursions.next();
    out[k] = {e.size(), descent_count(e.block), descent_count(inverse(e.block))};
  });
  return out;
}

ExcursionMoments excursion_moments(const std::vector<ExcursionSummary>& summaries, double q) {
  if (summaries.size() < 2) throw PreconditionViolated("excursion moments need at least 2 excursions");
  const double c = q / (1.0 + q);
  std::vector<double> t, x, y, des;
  for (const auto& s : summaries) {
    const double size = static_cast<double>(s.size);
    t.push_back(size);
    des.push_back(static_cast<double>(s.des));
    x.push_back(static_cast<double>(s.des) - c * size);
    y.push_back(static_cast<double>(s.ides) - c * size);
  }
  ExcursionMoments m;
  const double r = static_cast<double>(summaries.size());
  m.count = summaries.size();
  m.mean_T = mean_of(t);
  m.mean_des = mean_of(des);
  m.mean_x = mean_of(x);
  const double mean_y = mean_of(y);
  double ides_sum = 0.0;
  for (const auto& s : summaries) ides_sum += static_cast<double>(s.ides);
  m.mean_ides = ides_sum / r;
  double t2 = 0.0, t3 = 0.0, vt = 0.0, vd = 0.0;
  for (std::size_t k = 0; k < summaries.size(); ++k) {
    t2 += t[k] * t[k];
    t3 += t[k] * t[k] * t[k];
    vt += (t[k] - m.mean_T) * (t[k] - m.mean_T);
    vd += (des[k] - m.mean_des) * (des[k] - m.mean_des);
    m.var_x += (x[k] - m.mean_x) * (x[k] - m.mean_x);
    m.var_y += (y[k] - mean_y) * (y[k] - mean_y);
    m.cov_xy += (x[k] - m.mean_x) * (y[k] - mean_y);
  }
  m.mean_T2 = t2 / r;
  m.mean_T3 = t3 / r;
  m.var_T = vt / (r - 1.0);
  m.var_x /= r - 1.0;
  m.var_y /= r - 1.0;
  m.cov_xy /= r - 1.0;
  m.se_mean_T = std::sqrt(m.var_T / r);
  m.se_mean_des = std::sqrt(vd / (r - 1.0) / r);
  m.se_mean_x = std::sqrt(m.var_x / r);
  return m;
}

RenewalStats renewal_stats(std::uint64_t n, double q, std::size_t reps, const RngStream& stream, unsigned threads) {
  require_sub_unit(q);
  if (n == 0 || reps < 2) throw PreconditionViolated("renewal_stats needs n >= 1 and reps >= 2");
  std::vector<double> counts(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    SeededRng rng = stream.at(r);
    ChainState state;
    std::uint64_t renewals = 0;
    for (std::uint64_t t = 0; t < n; ++t) {
      state = chain_step(state, geometric_rank(q, rng));
      renewals += state.m == 0;
    }
    counts[r] = static_cast<double>(renewals);
  });
  const double nd = static_cast<double>(n);
  const auto [var, var_se] = variance_with_se(counts);
  RenewalStats s;
  s.n = n;
  s.reps = reps;
  s.mean_ratio = mean_of(counts) / nd;
  s.mean_ratio_se = std::sqrt(var / static_cast<double>(reps)) / nd;
  s.var_ratio = var / nd;
  s.var_ratio_se = var_se / nd;
  return s;
}

RenewalLimits renewal_limits(const std::vector<ExcursionSummary>& summaries) {
  if (summaries.size() < 2) throw PreconditionViolated("renewal limits need at least 2 excursions");
  const double r = static_cast<double>(summaries.size());
  double m1 = 0.0, m2 = 0.0;
  for (const auto& s : summaries) {
    const double t = static_cast<double>(s.size);
    m1 += t;
    m2 += t * t;
  }
  m1 /= r;
  m2 /= r;
  // Sample covariance matrix of (T, T^2), for the delta method.
  double v11 = 0.0, v22 = 0.0, v12 = 0.0;
  for (const auto& s : summaries) {
    const double t = static_cast<double>(s.size);
    v11 += (t - m1) * (t - m1);
    v22 += (t * t - m2) * (t * t - m2);
    v12 += (t - m1) * (t * t - m2);
  }
  v11 /= r - 1.0;
  v22 /= r - 1.0;
  v12 /= r - 1.0;
  RenewalLimits lim;
  lim.mean_ratio = 1.0 / m1;
  lim.mean_ratio_se = std::sqrt(v11 / r) / (m1 * m1);
  const double var_t = m2 - m1 * m1;
  lim.var_ratio = var_t / (m1 * m1 * m1);
  lim.second_moment_ratio = m2 / (m1 * m1 * m1);
  const double g1 = -2.0 / (m1 * m1) - 3.0 * var_t / (m1 * m1 * m1 * m1);
  const double g2 = 1.0 / (m1 * m1 * m1);
  lim.var_ratio_se = std::sqrt(std::max(0.0, (g1 * g1 * v11 + 2.0 * g1 * g2 * v12 + g2 * g2 * v22) / r));
  return lim;
}

RhoEstimate rho_from_excursions(const std::vector<ExcursionSummary>& summaries, double q) {
  if (summaries.size() < kRhoBatches * 2) {
    throw PreconditionViolated("the excursion estimator needs at least " + std::to_string(kRhoBatches * 2) +
                               " excursions");
  }
  const ExcursionMoments all = excursion_moments(summaries, q);
  RhoEstimate est;
  est.excursions = summaries.size();
  est.mean_T = all.mean_T;
  est.rho = all.cov_xy / all.var_x;
  std::vector<double> batch_rho;
  for (std::size_t b = 0; b < kRhoBatches; ++b) {
    const std::size_t begin = summaries.size() * b / kRhoBatches;
    const std::size_t end = summaries.size() * (b + 1) / kRhoBatches;
    const std::vector<ExcursionSummary> part(summaries.begin() + static_cast<std::ptrdiff_t>(begin),
                                             summaries.begin() + static_cast<std::ptrdiff_t>(end));
    const ExcursionMoments m = excursion_moments(part, q);
    if (m.var_x > 0.0) batch_rho.push_back(m.cov_xy / m.var_x);
  }
  const auto [batch_var, unused] = variance_with_se(batch_rho);
  est.se = std::sqrt(batch_var / static_cast<double>(batch_rho.size()));
  return est;
}

RhoEstimate estimate_rho_excursion(double q, std::size_t excursions, const RngStream& stream, std::uint64_t max_len,
                                   unsigned threads) {
  if (excursions < kMinRhoExcursions) {
    throw PreconditionViolated("the excursion estimator needs at least " + std::to_string(kMinRhoExcursions) +
                               " excursions");
  }
  return rho_from_excursions(sample_excursions(q, excursions, stream, max_len, threads), q);
}

}  // namespace mallows
