#include "mallows/report.hpp"

#include <chrono>
#include <cmath>
#include <functional>

#include "mallows/errors.hpp"
#include "mallows/exact.hpp"
#include "mallows/limits.hpp"
#include "mallows/regen.hpp"
#include "mallows/sampler.hpp"
#include "mallows/size_bias.hpp"
#include "mallows/stats.hpp"

namespace mallows {

using nlohmann::json;

bool ExperimentReport::all_pass() const {
  for (const auto& [name, ok] : pass) {
    if (!ok) return false;
  }
  return true;
}

json ExperimentReport::to_json() const {
  json j;
  j["command"] = command;
  j["params"] = params;
  j["seed"] = seed;
  j["results"] = results;
  j["bounds"] = bounds;
  j["pass"] = json(pass);
  j["notes"] = notes;
  if (runtime_ms) j["runtime_ms"] = *runtime_ms;
  return j;
}

void validate_report(const json& report) {
  auto fail = [](const std::string& what) { throw UsageError("invalid report: " + what); };
  if (!report.is_object()) fail("not an object");
  for (const char* key : {"command", "params", "seed", "results", "bounds", "pass", "notes"}) {
    if (!report.contains(key)) fail(std::string("missing '") + key + "'");
  }
  if (!report["command"].is_string()) fail("command is not a string");
  if (!report["seed"].is_number_unsigned()) fail("seed is not an unsigned integer");
  for (const char* key : {"params", "results", "bounds", "pass"}) {
    if (!report[key].is_object()) fail(std::string(key) + " is not an object");
  }
  for (const auto& [name, flag] : report["pass"].items()) {
    if (!flag.is_boolean()) fail("pass flag '" + name + "' is not boolean");
  }
  if (!report["notes"].is_array()) fail("notes is not an array");
  for (const auto& note : report["notes"]) {
    if (!note.is_string()) fail("notes entry is not a string");
  }
  if (report.contains("runtime_ms") && !report["runtime_ms"].is_number()) fail("runtime_ms is not a number");
  const auto& cmds = command_names();
  if (std::find(cmds.begin(), cmds.end(), report["command"].get<std::string>()) == cmds.end()) {
    fail("unknown command");
  }
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"sample", "moments", "typesums", "sbcheck", "vterm", "tails",
                                              "rho",    "clt",     "bivariate", "poisson", "figure1"};
  return names;
}

namespace {

std::size_t require_n(const RunConfig& c) {
  if (!c.n) throw UsageError(c.command + " needs --n");
  return *c.n;
}

double require_q(const RunConfig& c) {
  if (!c.q) throw UsageError(c.command + " needs --q");
  return *c.q;
}

MallowsParams require_params(const RunConfig& c) { return MallowsParams(require_n(c), require_q(c)); }

std::size_t reps_or(const RunConfig& c, std::size_t fallback) {
  const std::size_t r = c.reps.value_or(fallback);
  if (r == 0) throw UsageError("--reps must be at least 1");
  return r;
}

std::string format_or(const RunConfig& c, const std::string& fallback, std::initializer_list<const char*> allowed) {
  const std::string f = c.format.value_or(fallback);
  for (const char* a : allowed) {
    if (f == a) return f;
  }
  throw UsageError("format '" + f + "' is not available for " + c.command);
}

RngStream stream_for(const RunConfig& c) { return {c.seed, c.command}; }

ExperimentReport new_report(const RunConfig& c) {
  ExperimentReport r;
  r.command = c.command;
  r.seed = c.seed;
  if (c.n) r.params["n"] = *c.n;
  if (c.q) r.params["q"] = *c.q;
  return r;
}

json clt_json(const CltReport& r) {
  return {{"function", r.function},   {"exact_mean", r.exact_mean}, {"sample_sd", r.sample_sd},
          {"average_h", r.average_h}, {"deviation", r.deviation},   {"deviation_se", r.deviation_se},
          {"ks", r.ks}};
}

json rho_json(const RhoEstimate& e, double q) {
  return {{"q", q}, {"rho", e.rho}, {"se", e.se}, {"mean_T", e.mean_T}, {"n_excursions", e.excursions}};
}

// Descent statistics of Monte Carlo draws, used by moments without --exact.
struct DrawMoments {
  double mean_des = 0, mean_des_se = 0, mean_two_sided = 0, mean_two_sided_se = 0;
  double var_des = 0, var_des_se = 0, cov = 0, var_two_sided = 0, rho = 0;
};

DrawMoments draw_moments(const std::vector<DescentPair>& draws) {
  std::vector<double> d, i, x;
  for (const auto& p : draws) {
    d.push_back(p.des);
    i.push_back(p.ides);
    x.push_back(p.two_sided());
  }
  const double r = static_cast<double>(draws.size());
  DrawMoments m;
  m.mean_des = sample_mean(d);
  m.var_des = sample_variance(d);
  m.mean_des_se = std::sqrt(m.var_des / r);
  m.mean_two_sided = sample_mean(x);
  m.var_two_sided = sample_variance(x);
  m.mean_two_sided_se = std::sqrt(m.var_two_sided / r);
  const double mi = sample_mean(i);
  double m4 = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    m.cov += (d[k] - m.mean_des) * (i[k] - mi);
    m4 += std::pow(d[k] - m.mean_des, 4);
  }
  m.cov /= r - 1.0;
  m4 /= r;
  m.var_des_se = std::sqrt(std::max(0.0, (m4 - m.var_des * m.var_des * (r - 3.0) / (r - 1.0)) / r));
  m.rho = m.var_des > 0.0 ? m.cov / m.var_des : 0.0;
  return m;
}

CommandOutput run_sample(const RunConfig& c) {
  const MallowsParams params = require_params(c);
  const std::string format = format_or(c, "text", {"text", "binary", "json"});
  const RngStream stream = stream_for(c);
  std::vector<Permutation> perms(c.count, Permutation::identity(0));
  for (std::size_t k = 0; k < c.count; ++k) {
    SeededRng rng = stream.at(k);
    perms[k] = sample_finite(params, rng);
  }
  CommandOutput out;
  if (format == "text") {
    for (const auto& p : perms) out.body += to_string(p) + "\n";
  } else if (format == "binary") {
    auto put = [&](std::uint32_t v) {
      for (int b = 0; b < 4; ++b) out.body.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
    };
    for (const auto& p : perms) {
      put(static_cast<std::uint32_t>(p.size()));
      for (const auto v : p.values()) put(v);
    }
  } else {
    json j = {{"n", params.n()}, {"q", params.q()}, {"seed", c.seed}, {"permutations", json::array()}};
    for (const auto& p : perms) j["permutations"].push_back(std::vector<std::uint32_t>(p.values().begin(), p.values().end()));
    out.body = j.dump() + "\n";
  }
  return out;
}

ExperimentReport run_moments(const RunConfig& c) {
  const MallowsParams params = require_params(c);
  ExperimentReport r = new_report(c);
  r.params["exact"] = c.exact;
  const double mean_formula = formula_mean_two_sided(params);
  r.bounds["mean_two_sided_formula"] = mean_formula;
  if (params.n() >= 2) r.bounds["var_des_formula"] = formula_var_des(params);
  const bool has_cov_bounds = params.q() < 1.0 && params.n() >= 2;
  CovBounds cb;
  if (has_cov_bounds) {
    cb = cov_bounds(params);
    r.bounds["cov_lower"] = cb.lower;
    r.bounds["cov_upper"] = cb.upper;
  }
  if (c.exact) {
    const ExactLaw law = enumerate_law(params);
    const MomentSummary m = exact_moments(law);
    const double qf = q_factorial(params.n(), params.q());
    r.bounds["q_factorial"] = qf;
    r.results = {{"normalization", law.normalization()}, {"mean_des", m.mean_des},
                 {"mean_two_sided", m.mean_two_sided},    {"var_des", m.var_des},
                 {"var_ides", m.var_ides},                {"cov_des_ides", m.cov_des_ides},
                 {"var_two_sided", m.var_two_sided},      {"rho", m.rho}};
    const double tol = 1e-12;
    r.pass["normalization_matches_q_factorial"] = std::abs(law.normalization() - qf) <= tol * std::max(1.0, qf);
    r.pass["mean_matches_formula"] = std::abs(m.mean_two_sided - mean_formula) <= tol * std::max(1.0, mean_formula);
    if (params.n() >= 2) {
      const double vf = formula_var_des(params);
      r.pass["var_des_matches_formula"] = std::abs(m.var_des - vf) <= tol * std::max(1.0, vf);
    }
    if (has_cov_bounds) r.pass["cov_within_bounds"] = m.cov_des_ides >= cb.lower && m.cov_des_ides <= cb.upper;
  } else {
    const std::size_t reps = reps_or(c, kDefaultReps);
    if (reps < 2) throw UsageError("moments needs --reps >= 2 without --exact");
    r.params["reps"] = reps;
    const DrawMoments m = draw_moments(draw_descent_pairs(params, reps, stream_for(c), c.threads));
    r.results = {{"mean_des", m.mean_des},
                 {"mean_des_se", m.mean_des_se},
                 {"mean_two_sided", m.mean_two_sided},
                 {"mean_two_sided_se", m.mean_two_sided_se},
                 {"var_des", m.var_des},
                 {"var_des_se", m.var_des_se},
                 {"cov_des_ides", m.cov},
                 {"var_two_sided", m.var_two_sided},
                 {"rho", m.rho}};
    r.pass["mean_within_4se"] = std::abs(m.mean_two_sided - mean_formula) <= 4.0 * m.mean_two_sided_se;
    if (params.n() >= 2) {
      r.pass["var_des_within_4se"] = std::abs(m.var_des - formula_var_des(params)) <= 4.0 * m.var_des_se;
    }
  }
  return r;
}

ExperimentReport run_typesums(const RunConfig& c) {
  const MallowsParams params = require_params(c);
  if (params.n() < 2) throw UsageError("typesums needs n >= 2");
  ExperimentReport r = new_report(c);
  const ExactLaw law = enumerate_law(params);
  const double m = static_cast<double>(params.n() - 1);
  const bool admissible = params.q() <= 1.0;
  for (int t = 1; t <= 6; ++t) {
    const std::string key = "type" + std::to_string(t);
    const double value = type_sum(t, law);
    r.results[key] = value;
    r.bounds[key] = type_sum_constant(t) * m;
    if (admissible) r.pass[key + "_within_bound"] = std::abs(value) <= type_sum_constant(t) * m;
  }
  const double adjacent = adjacent_pair_sum(law);
  r.results["adjacent_pair_sum"] = adjacent;
  r.bounds["adjacent_pair_sum"] = kAdjacentPairConstant * m;
  const bool adjacent_applies =
      admissible && params.n() >= 4 && params.q() >= 1.0 - 1.0 / std::sqrt(m);
  r.results["adjacent_bound_applies"] = adjacent_applies;
  if (adjacent_applies) r.pass["adjacent_pair_sum_within_bound"] = adjacent <= kAdjacentPairConstant * m;
  const double vterm = exact_variance_term(law);
  r.results["variance_term"] = vterm;
  const double constant = params.q() == 1.0 ? kUniformVarianceTermConstant : kVarianceTermConstant;
  r.bounds["variance_term"] = constant / m;
  if (admissible) r.pass["variance_term_within_bound"] = vterm <= constant / m;
  if (!admissible) r.notes.emplace_back("type bounds are stated for q <= 1; no pass flags at q > 1");
  return r;
}

ExperimentReport run_sbcheck(const RunConfig& c) {
  const MallowsParams params = require_params(c);
  ExperimentReport r = new_report(c);
  const CouplingCheck check = exact_coupling_check(enumerate_law(params));
  json coupled = json::object(), target = json::object();
  for (const auto& [x, p] : check.coupled) coupled[std::to_string(x)] = p;
  for (const auto& [x, p] : check.size_biased) target[std::to_string(x)] = p;
  r.results = {{"max_deviation", check.max_deviation}, {"coupled_law", coupled}, {"size_biased_law", target}};
  r.bounds["max_deviation"] = 1e-12;
  r.pass["coupling_exact"] = check.max_deviation <= 1e-12;
  return r;
}

ExperimentReport run_vterm(const RunConfig& c) {
  const MallowsParams params = require_params(c);
  const std::size_t reps = reps_or(c, kDefaultReps);
  ExperimentReport r = new_report(c);
  r.params["reps"] = reps;
  const VarianceTerm v = variance_term(params, reps, stream_for(c), c.threads);
  r.results = {{"estimate", v.estimate}, {"standard_error", v.standard_error}, {"mean_delta", v.mean}};
  r.bounds["variance_term"] = v.bound;
  if (params.q() <= 1.0) {
    r.pass["within_bound"] = v.estimate <= v.bound;
  } else {
    r.notes.emplace_back("the variance-term bound is stated for q <= 1; no pass flag at q > 1");
  }
  return r;
}

ExperimentReport run_tails(const RunConfig& c) {
  const MallowsParams params = require_params(c);
  const std::size_t reps = reps_or(c, kDefaultReps);
  const std::vector<double> xs = c.xs.empty() ? std::vector<double>{10.0, 20.0, 40.0} : c.xs;
  ExperimentReport r = new_report(c);
  r.params["reps"] = reps;
  r.params["xs"] = xs;
  const TailReport t = tail_check(params, reps, stream_for(c), xs, c.threads);
  r.results["mu"] = t.mu;
  r.results["points"] = json::array();
  r.bounds["points"] = json::array();
  for (const auto& p : t.points) {
    json point = {{"x", p.x},
                  {"upper_frequency", p.upper_frequency},
                  {"upper_se", p.upper_se},
                  {"lower_frequency", p.lower_frequency},
                  {"lower_se", p.lower_se},
                  {"lower_applicable", p.lower_applicable}};
    r.results["points"].push_back(point);
    json bound = {{"x", p.x}, {"upper", p.upper_bound}};
    if (p.lower_applicable) bound["lower"] = p.lower_bound;
    r.bounds["points"].push_back(bound);
    // Integral x prints without a fractional part.
    char label[32];
    std::snprintf(label, sizeof label, "%g", p.x);
    r.pass[std::string("upper_x") + label] = p.upper_pass;
    if (p.lower_applicable) r.pass[std::string("lower_x") + label] = p.lower_pass;
  }
  r.notes.emplace_back("pass: frequency <= bound + 3 SE");
  return r;
}

ExperimentReport run_rho(const RunConfig& c) {
  const double q = require_q(c);
  ExperimentReport r = new_report(c);
  r.params["excursions"] = c.excursions;
  r.params["max_len"] = c.max_len;
  // rho(q) = rho(1/q); the process itself needs q < 1.
  const double q_process = q > 1.0 ? 1.0 / q : q;
  if (q > 1.0) r.notes.emplace_back("estimated at 1/q by reversal symmetry");
  const RhoEstimate e = estimate_rho_excursion(q_process, c.excursions, stream_for(c), c.max_len, c.threads);
  r.results = rho_json(e, q);
  r.pass["rho_in_unit_interval"] = e.rho > 0.0 && e.rho < 1.0;
  return r;
}

ExperimentReport run_clt(const RunConfig& c) {
  const MallowsParams params = require_params(c);
  const std::size_t reps = reps_or(c, kDefaultReps);
  ExperimentReport r = new_report(c);
  r.params["reps"] = reps;
  r.params["h"] = c.h;
  std::vector<TestFunction> functions;
  if (c.h == "all") {
    functions = {TestFunction::tanh(), TestFunction::cosine()};
  } else {
    functions = {TestFunction::from_name(c.h)};
  }
  const std::vector<DescentPair> draws = draw_descent_pairs(params, reps, stream_for(c), c.threads);
  r.results["functions"] = json::object();
  for (const auto& h : functions) {
    const CltReport rep = clt_from_draws(params, draws, h);
    r.results["functions"][h.name] = clt_json(rep);
    r.results["ks"] = rep.ks;
    r.bounds[h.name] = rep.bound;
    r.pass[h.name + "_within_bound"] = rep.bound_holds();
  }
  r.notes.emplace_back("W is centered by the exact mean and scaled by the sample standard deviation");
  r.notes.emplace_back("ks is a rate diagnostic and carries no pass flag");
  return r;
}

ExperimentReport run_bivariate(const RunConfig& c) {
  const MallowsParams params = require_params(c);
  const std::size_t reps = reps_or(c, kDefaultReps);
  ExperimentReport r = new_report(c);
  r.params["reps"] = reps;
  r.params["excursions"] = c.excursions;
  const BivariateResult b = bivariate_experiment(params, reps, stream_for(c), c.threads);
  r.results = {{"sample_correlation", b.sample_correlation},
               {"correlation_se", b.correlation_se},
               {"projection_ks", b.projection_ks}};
  const std::optional<RhoEstimate> ref =
      reference_rho(params.q(), c.excursions, stream_for(c).child("reference"), c.max_len, c.threads);
  r.results["rho_reference"] = ref ? json(ref->rho) : json(nullptr);
  r.results["rho_reference_se"] = ref ? json(ref->se) : json(nullptr);
  r.bounds["projection_ks"] = kProjectionKsTolerance;
  r.pass["correlation_in_range"] = std::abs(b.sample_correlation) <= 1.0;
  for (const auto& [dir, ks] : b.projection_ks) r.pass["projection_ks_" + dir] = ks <= kProjectionKsTolerance;
  return r;
}

CommandOutput run_poisson(const RunConfig& c, ExperimentReport& r) {
  const MallowsParams params = require_params(c);
  const std::size_t reps = reps_or(c, kDefaultReps);
  r.params["reps"] = reps;
  const PoissonCheck p = poisson_experiment(params, reps, stream_for(c), c.threads);
  r.results = {{"lambda", p.lambda},         {"empirical_tv", p.empirical_tv}, {"tv_se", p.tv_se},
               {"even_fraction", p.even_fraction}, {"even_fraction_se", p.even_fraction_se},
               {"vacuous", p.vacuous}};
  r.bounds = {{"tv", p.bound}, {"even_fraction", p.even_bound}};
  r.pass["tv_within_bound"] = p.tv_pass();
  r.pass["even_fraction_above_bound"] = p.even_pass();
  CommandOutput out;
  if (p.vacuous) out.warnings.push_back("VacuousBound: 12 q^2 n >= 1, the TV bound carries no information");
  return out;
}

CommandOutput run_figure1(const RunConfig& c) {
  Figure1Config fc;
  fc.grid = c.grid.empty() ? default_figure1_grid() : c.grid;
  fc.n = c.n.value_or(1000);
  fc.reps = reps_or(c, 1000);
  fc.excursion_reps = c.excursions;
  fc.max_len = c.max_len;
  const std::string format = format_or(c, "csv", {"csv", "json"});
  const std::vector<Figure1Row> rows = figure1(fc, stream_for(c), c.threads);
  CommandOutput out;
  for (const auto& row : rows) {
    if (row.excursion_status == "too_long") {
      out.warnings.push_back("excursion exceeded max_len at q = " + std::to_string(row.q));
    }
  }
  if (format == "csv") {
    out.body = figure1_csv(rows);
    return out;
  }
  ExperimentReport r = new_report(c);
  r.params = {{"n", fc.n}, {"reps", fc.reps}, {"excursions", fc.excursion_reps}, {"max_len", fc.max_len},
              {"grid", fc.grid}};
  r.results["rows"] = json::array();
  for (const auto& row : rows) {
    r.results["rows"].push_back({{"q", row.q},
                                 {"rho_finite", row.rho_finite},
                                 {"se_finite", row.se_finite},
                                 {"rho_excursion", row.rho_excursion ? json(*row.rho_excursion) : json(nullptr)},
                                 {"se_excursion", row.se_excursion ? json(*row.se_excursion) : json(nullptr)},
                                 {"excursion_status", row.excursion_status}});
  }
  out.report = std::move(r);
  return out;
}

}  // namespace

CommandOutput dispatch(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  CommandOutput out;
  const std::string& cmd = config.command;
  if (cmd == "sample") return run_sample(config);
  if (cmd == "figure1") {
    out = run_figure1(config);
  } else {
    if (config.format && *config.format != "json") throw UsageError(cmd + " writes json reports only");
    const std::map<std::string, std::function<ExperimentReport(const RunConfig&)>> handlers{
        {"moments", run_moments}, {"typesums", run_typesums}, {"sbcheck", run_sbcheck},
        {"vterm", run_vterm},     {"tails", run_tails},       {"rho", run_rho},
        {"clt", run_clt},         {"bivariate", run_bivariate}};
    if (cmd == "poisson") {
      ExperimentReport r = new_report(config);
      out = run_poisson(config, r);
      out.report = std::move(r);
    } else {
      const auto it = handlers.find(cmd);
      if (it == handlers.end()) throw UsageError("unknown command '" + cmd + "'");
      out.report = it->second(config);
    }
  }
  if (out.report) {
    if (config.timing) {
      out.report->runtime_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    out.all_pass = out.report->all_pass();
    out.body = out.report->to_json().dump(2) + "\n";
  }
  return out;
}

}  // namespace mallows
