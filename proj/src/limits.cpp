#include "mallows/limits.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "mallows/errors.hpp"
#include "mallows/exact.hpp"
#include "mallows/stats.hpp"

namespace mallows {

double TestFunction::operator()(double x) const { return name == "tanh" ? std::tanh(x) : std::cos(x); }

TestFunction TestFunction::tanh() { return {"tanh", 1.0, 1.0, 0.0}; }

TestFunction TestFunction::cosine() { return {"cosine", 1.0, 1.0, std::exp(-0.5)}; }

TestFunction TestFunction::from_name(const std::string& name) {
  if (name == "tanh") return tanh();
  if (name == "cosine" || name == "cos") return cosine();
  throw UsageError("unknown test function '" + name + "' (expected tanh or cosine)");
}

double clt_bound(const TestFunction& h, const MallowsParams& params) {
  if (params.n() < 2) throw PreconditionViolated("the CLT bound needs n >= 2");
  const double q = params.q();
  const double scale = std::max(1.0 / std::sqrt(q), std::sqrt(q));
  return (331.0 * h.sup_norm + 167.0 * h.derivative_sup_norm * scale) / std::sqrt(static_cast<double>(params.n() - 1));
}

std::vector<double> standardized_two_sided(const MallowsParams& params, const std::vector<DescentPair>& draws) {
  std::vector<double> x(draws.size());
  for (std::size_t k = 0; k < draws.size(); ++k) x[k] = static_cast<double>(draws[k].two_sided());
  const double mean = formula_mean_two_sided(params);
  const double sd = std::sqrt(sample_variance(x));
  if (sd == 0.0) throw PreconditionViolated("the two-sided statistic has zero sample variance");
  for (double& v : x) v = (v - mean) / sd;
  return x;
}

CltReport clt_from_draws(const MallowsParams& params, const std::vector<DescentPair>& draws, const TestFunction& h) {
  if (params.n() < 2) throw PreconditionViolated("clt_experiment needs n >= 2");
  if (draws.size() < 2) throw PreconditionViolated("clt_experiment needs at least 2 draws");
  CltReport r;
  r.n = params.n();
  r.q = params.q();
  r.reps = draws.size();
  r.function = h.name;
  r.exact_mean = formula_mean_two_sided(params);
  std::vector<double> raw(draws.size());
  for (std::size_t k = 0; k < draws.size(); ++k) raw[k] = static_cast<double>(draws[k].two_sided());
  r.sample_sd = std::sqrt(sample_variance(raw));
  const std::vector<double> w = standardized_two_sided(params, draws);
  std::vector<double> hw(w.size());
  std::transform(w.begin(), w.end(), hw.begin(), [&](double v) { return h(v); });
  r.average_h = sample_mean(hw);
  r.deviation = std::abs(r.average_h - h.reference);
  r.deviation_se = std::sqrt(sample_variance(hw) / static_cast<double>(hw.size()));
  r.bound = clt_bound(h, params);
  r.ks = ks_to_normal(w);
  return r;
}

CltReport clt_experiment(const MallowsParams& params, std::size_t reps, const TestFunction& h, const RngStream& stream,
                         unsigned threads) {
  return clt_from_draws(params, draw_descent_pairs(params, reps, stream, threads), h);
}

namespace {

double correlation_se(double r, std::size_t reps) {
  return (1.0 - r * r) / std::sqrt(static_cast<double>(std::max<std::size_t>(reps, 4) - 3));
}

}  // namespace

BivariateResult bivariate_from_draws(const MallowsParams& params, const std::vector<DescentPair>& draws) {
  if (params.n() < 2) throw PreconditionViolated("bivariate_experiment needs n >= 2");
  BivariateResult b;
  b.n = params.n();
  b.q = params.q();
  b.reps = draws.size();
  std::vector<double> des(draws.size()), ides(draws.size());
  for (std::size_t k = 0; k < draws.size(); ++k) {
    des[k] = draws[k].des;
    ides[k] = draws[k].ides;
  }
  b.sample_correlation = sample_correlation(des, ides);
  b.correlation_se = correlation_se(b.sample_correlation, draws.size());
  // Each of des and ides has mean (n-1) q / (1+q).
  const double single_mean = formula_mean_two_sided(params) / 2.0;
  for (const auto& [a, c] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{1, 2}}) {
    std::vector<double> proj(draws.size());
    for (std::size_t k = 0; k < draws.size(); ++k) proj[k] = a * des[k] + c * ides[k];
    const double mean = (a + c) * single_mean;
    const double sd = std::sqrt(sample_variance(proj));
    if (sd == 0.0) throw PreconditionViolated("projection has zero sample variance");
    for (double& v : proj) v = (v - mean) / sd;
    b.projection_ks[std::to_string(a) + "," + std::to_string(c)] = ks_to_normal(std::move(proj));
  }
  return b;
}

BivariateResult bivariate_experiment(const MallowsParams& params, std::size_t reps, const RngStream& stream,
                                     unsigned threads) {
  return bivariate_from_draws(params, draw_descent_pairs(params, reps, stream, threads));
}

std::optional<RhoEstimate> reference_rho(double q, std::size_t excursions, const RngStream& stream,
                                         std::uint64_t max_len, unsigned threads) {
  const double sub = std::min(q, 1.0 / q);
  if (sub > kExcursionQLimit || sub >= 1.0) return std::nullopt;
  return estimate_rho_excursion(sub, excursions, stream, max_len, threads);
}

std::vector<double> default_figure1_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 99; ++k) grid.push_back(k / 100.0);
  return grid;
}

std::vector<Figure1Row> figure1(const Figure1Config& config, const RngStream& stream, unsigned threads) {
  for (const double q : config.grid) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("figure1 grid values must lie in (0, 1)");
  }
  std::vector<Figure1Row> rows;
  for (std::size_t k = 0; k < config.grid.size(); ++k) {
    const double q = config.grid[k];
    const RngStream row_stream = stream.child("row" + std::to_string(k));
    Figure1Row row;
    row.q = q;
    const MallowsParams params(config.n, q);
    const BivariateResult b =
        bivariate_from_draws(params, draw_descent_pairs(params, config.reps, row_stream.child("finite"), threads));
    row.rho_finite = b.sample_correlation;
    row.se_finite = b.correlation_se;
    if (q > kExcursionQLimit) {
      row.excursion_status = "skipped";
    } else {
      try {
        const RhoEstimate e =
            estimate_rho_excursion(q, config.excursion_reps, row_stream.child("excursion"), config.max_len, threads);
        row.rho_excursion = e.rho;
        row.se_excursion = e.se;
        row.excursion_status = "ok";
      } catch (const ExcursionTooLong&) {
        row.excursion_status = "too_long";
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string figure1_csv(const std::vector<Figure1Row>& rows) {
  std::string out = "q,rho_finite,se_finite,rho_excursion,se_excursion,excursion_status\n";
  for (const auto& r : rows) {
    out += format_double(r.q) + "," + format_double(r.rho_finite) + "," + format_double(r.se_finite) + ",";
    out += (r.rho_excursion ? format_double(*r.rho_excursion) : std::string()) + ",";
    out += (r.se_excursion ? format_double(*r.se_excursion) : std::string()) + ",";
    out += r.excursion_status + "\n";
  }
  return out;
}

PoissonCheck poisson_experiment(const MallowsParams& params, std::size_t reps, const RngStream& stream,
                                unsigned threads) {
  if (params.n() < 2) throw PreconditionViolated("poisson_experiment needs n >= 2");
  if (reps == 0) throw PreconditionViolated("poisson_experiment needs reps >= 1");
  const double q = params.q();
  const double n = static_cast<double>(params.n());
  PoissonCheck c;
  c.n = params.n();
  c.q = q;
  c.samples = reps;
  c.lambda = (n - 1.0) * q / (1.0 + q);
  c.bound = 12.0 * q * q * n;
  c.vacuous = c.bound >= 1.0;
  c.even_bound = 1.0 - 2.0 * q * q * n;

  const std::vector<DescentPair> draws = draw_descent_pairs(params, reps, stream, threads);
  std::vector<std::int64_t> x(reps);
  std::size_t even = 0;
  for (std::size_t k = 0; k < reps; ++k) {
    x[k] = draws[k].two_sided();
    even += x[k] % 2 == 0;
  }
  const DiscreteLaw empirical = empirical_law(x);
  DiscreteLaw doubled;
  const std::vector<double> pmf = poisson_pmf(c.lambda);
  for (std::size_t k = 0; k < pmf.size(); ++k) doubled[static_cast<std::int64_t>(2 * k)] = pmf[k];
  c.empirical_tv = total_variation(empirical, doubled);
  // Conservative: the per-cell standard errors added without cancellation.
  const double r = static_cast<double>(reps);
  for (const auto& [value, p] : empirical) c.tv_se += 0.5 * std::sqrt(p * (1.0 - p) / r);
  c.even_fraction = static_cast<double>(even) / r;
  c.even_fraction_se = std::sqrt(c.even_fraction * (1.0 - c.even_fraction) / r);
  return c;
}

}  // namespace mallows
