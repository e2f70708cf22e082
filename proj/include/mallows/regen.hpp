#pragma once

#include <cstdint>
#include <vector>

#include "mallows/permutation.hpp"
#include "mallows/rng.hpp"
#include "mallows/sampler.hpp"

namespace mallows {

inline constexpr std::uint64_t kDefaultMaxExcursion = 1'000'000;

// One regeneration block of the Mallows process, shifted to start at 1.
struct Excursion {
  Permutation block;
  [[nodiscard]] std::size_t size() const { return block.size(); }
};

// Cuts a single run of the Mallows process at every n where w(1..n) is a
// permutation of {1..n}. Successive excursions are i.i.d.
class ExcursionStream {
 public:
  // Throws DomainError unless 0 < q < 1, PreconditionViolated if max_len == 0.
  ExcursionStream(double q, SeededRng rng, std::uint64_t max_len = kDefaultMaxExcursion);

  // Throws ExcursionTooLong once a block exceeds max_len values.
  Excursion next();
  // Process values consumed so far.
  [[nodiscard]] std::uint64_t time() const { return process_.time(); }

 private:
  MallowsProcess process_;
  SeededRng rng_;
  std::uint64_t max_len_;
  std::vector<Permutation::value_type> scratch_;
};

// mu_j = prod_{k>=1}(1 - q^k) * q^j / prod_{k=1..j}(1 - q^k), which sums to 1.
double stationary_pmf(std::size_t j, double q);
// mu_0, ..., mu_K with K the first index whose remaining tail mass is < 1e-15.
std::vector<double> stationary_law(double q);

// M_n = max_{i<=n} w(i) - n.
struct ChainState {
  std::uint64_t m = 0;
};

// M <- max(M, z) - 1 for a rank z >= 1.
ChainState chain_step(ChainState state, std::uint64_t z);

struct ChainRun {
  std::uint64_t steps = 0;
  // occupation[m] counts the steps after which M equals m.
  std::vector<std::uint64_t> occupation;
  // Gaps between successive visits to 0, the first measured from time 0.
  std::vector<std::uint64_t> return_times;
  [[nodiscard]] std::vector<double> frequencies() const;
  [[nodiscard]] double mean_return_time() const;
  [[nodiscard]] double return_time_se() const;
};

// Runs the chain from M_0 = 0; requires 0 < q < 1.
ChainRun simulate_chain(double q, std::uint64_t steps, SeededRng& rng);
// Total variation between the occupation frequencies and the stationary law.
double occupation_distance(const ChainRun& run, double q);

// Per-excursion statistics: size T and des of the block and of its inverse.
struct ExcursionSummary {
  std::uint64_t size = 0;
  std::uint64_t des = 0;
  std::uint64_t ides = 0;
};

// Summary k is the first excursion of an independent process driven by
// stream.at(k), so the result does not depend on the worker count.
std::vector<ExcursionSummary> sample_excursions(double q, std::size_t count, const RngStream& stream,
                                                std::uint64_t max_len = kDefaultMaxExcursion, unsigned threads = 0);

// Sample moments of the excursion statistics, with x = des - T q/(1+q) and
// y = ides - T q/(1+q).
struct ExcursionMoments {
  std::size_t count = 0;
  double mean_T = 0.0;
  double mean_T2 = 0.0;
  double mean_T3 = 0.0;
  double mean_des = 0.0;
  double mean_ides = 0.0;
  double mean_x = 0.0;  // E des(w0) - E T0 q/(1+q), zero in the limit
  double var_x = 0.0;
  double var_y = 0.0;
  double cov_xy = 0.0;
  double se_mean_T = 0.0;
  double se_mean_des = 0.0;
  double se_mean_x = 0.0;
  double var_T = 0.0;
};

ExcursionMoments excursion_moments(const std::vector<ExcursionSummary>& summaries, double q);

struct RenewalStats {
  std::uint64_t n = 0;
  std::size_t reps = 0;
  double mean_ratio = 0.0;  // E(L_n)/n
  double mean_ratio_se = 0.0;
  double var_ratio = 0.0;  // Var(L_n)/n
  double var_ratio_se = 0.0;
};

// L_n = number of completed excursions by time n, from reps independent chain runs.
RenewalStats renewal_stats(std::uint64_t n, double q, std::size_t reps, const RngStream& stream,
                           unsigned threads = 0);

// Renewal limits computed from excursion moments.
struct RenewalLimits {
  double mean_ratio = 0.0;  // 1 / E T0
  double mean_ratio_se = 0.0;
  double var_ratio = 0.0;  // Var T0 / (E T0)^3
  double var_ratio_se = 0.0;
  double second_moment_ratio = 0.0;  // E T0^2 / (E T0)^3
};

RenewalLimits renewal_limits(const std::vector<ExcursionSummary>& summaries);

inline constexpr std::size_t kRhoBatches = 50;
inline constexpr std::size_t kMinRhoExcursions = 1000;

struct RhoEstimate {
  double rho = 0.0;
  double se = 0.0;
  double mean_T = 0.0;
  std::size_t excursions = 0;
};

// Cov(x, y) / Var(x) over the excursion sample; SE from 50 equal batches.
RhoEstimate rho_from_excursions(const std::vector<ExcursionSummary>& summaries, double q);
RhoEstimate estimate_rho_excursion(double q, std::size_t excursions, const RngStream& stream,
                                   std::uint64_t max_len = kDefaultMaxExcursion, unsigned threads = 0);

}  // namespace mallows
