#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mallows/q_analog.hpp"
#include "mallows/regen.hpp"
#include "mallows/rng.hpp"
#include "mallows/sampler.hpp"

namespace mallows {

// Smooth bounded test functions with ||h|| = ||h'|| = 1 and known E h(Z).
struct TestFunction {
  std::string name;
  double sup_norm = 1.0;
  double derivative_sup_norm = 1.0;
  double reference = 0.0;  // E h(Z), Z standard normal

  [[nodiscard]] double operator()(double x) const;

  static TestFunction tanh();
  static TestFunction cosine();
  // Accepts "tanh" and "cosine" (or "cos"); throws UsageError otherwise.
  static TestFunction from_name(const std::string& name);
};

// (331 ||h|| + 167 ||h'|| max(q^-1/2, q^1/2)) / sqrt(n - 1); requires n >= 2.
double clt_bound(const TestFunction& h, const MallowsParams& params);

struct CltReport {
  std::size_t n = 0;
  double q = 0.0;
  std::size_t reps = 0;
  std::string function;
  double exact_mean = 0.0;
  double sample_sd = 0.0;
  double average_h = 0.0;
  double deviation = 0.0;  // |average_h - E h(Z)|
  double deviation_se = 0.0;
  double bound = 0.0;
  double ks = 0.0;
  [[nodiscard]] bool bound_holds() const { return deviation <= bound; }
};

// W = (X - E X) / s, with the closed-form mean and the sample sd s.
std::vector<double> standardized_two_sided(const MallowsParams& params, const std::vector<DescentPair>& draws);
CltReport clt_from_draws(const MallowsParams& params, const std::vector<DescentPair>& draws, const TestFunction& h);
CltReport clt_experiment(const MallowsParams& params, std::size_t reps, const TestFunction& h, const RngStream& stream,
                         unsigned threads = 0);

inline constexpr double kProjectionKsTolerance = 0.05;

struct BivariateResult {
  std::size_t n = 0;
  double q = 0.0;
  std::size_t reps = 0;
  double sample_correlation = 0.0;
  double correlation_se = 0.0;
  std::optional<double> rho_reference;
  // Keyed "a,b" for the projection a des + b ides.
  std::map<std::string, double> projection_ks;
};

// The sample correlation of (des, ides) and the Kolmogorov distance of
// standardized projections in directions (1,1), (2,1), (1,2).
BivariateResult bivariate_from_draws(const MallowsParams& params, const std::vector<DescentPair>& draws);
BivariateResult bivariate_experiment(const MallowsParams& params, std::size_t reps, const RngStream& stream,
                                     unsigned threads = 0);

// The asymptotic correlation is the same at q and 1/q. Returns the excursion
// estimate at min(q, 1/q) when that is at most 0.8, nothing otherwise.
std::optional<RhoEstimate> reference_rho(double q, std::size_t excursions, const RngStream& stream,
                                         std::uint64_t max_len, unsigned threads = 0);

inline constexpr double kExcursionQLimit = 0.8;

struct Figure1Row {
  double q = 0.0;
  double rho_finite = 0.0;
  double se_finite = 0.0;
  std::optional<double> rho_excursion;
  std::optional<double> se_excursion;
  // "ok", "skipped" (q above the excursion limit) or "too_long".
  std::string excursion_status;
};

struct Figure1Config {
  std::vector<double> grid;
  std::size_t n = 1000;
  std::size_t reps = 1000;
  std::size_t excursion_reps = 10000;
  std::uint64_t max_len = kDefaultMaxExcursion;
};

// 0.01, 0.02, ..., 0.99.
std::vector<double> default_figure1_grid();
std::vector<Figure1Row> figure1(const Figure1Config& config, const RngStream& stream, unsigned threads = 0);
// Columns q,rho_finite,se_finite,rho_excursion,se_excursion,excursion_status.
std::string figure1_csv(const std::vector<Figure1Row>& rows);

struct PoissonCheck {
  std::size_t n = 0;
  double q = 0.0;
  std::size_t samples = 0;
  double lambda = 0.0;
  double empirical_tv = 0.0;
  double tv_se = 0.0;
  double bound = 0.0;  // 12 q^2 n
  bool vacuous = false;
  double even_fraction = 0.0;
  double even_fraction_se = 0.0;
  double even_bound = 0.0;  // 1 - 2 q^2 n
  [[nodiscard]] bool tv_pass() const { return empirical_tv <= bound + 3.0 * tv_se; }
  [[nodiscard]] bool even_pass() const { return even_fraction >= even_bound - 3.0 * even_fraction_se; }
};

// TV between the law of X = des + ides and the law of 2N, N ~ Poisson(lambda),
// lambda = (n-1) q / (1+q).
PoissonCheck poisson_experiment(const MallowsParams& params, std::size_t reps, const RngStream& stream,
                                unsigned threads = 0);

}  // namespace mallows
