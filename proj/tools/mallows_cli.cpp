#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "mallows/errors.hpp"
#include "mallows/report.hpp"

namespace {

// Registers the shared flags on one subcommand.
void add_common(CLI::App* sub, mallows::RunConfig& c) {
  // --h names the test function, so help is reachable only as --help.
  sub->set_help_flag("--help", "print this help message and exit");
  sub->add_option("--n", c.n, "permutation size");
  sub->add_option("--q", c.q, "Mallows parameter")->check(CLI::PositiveNumber);
  sub->add_option("--reps", c.reps, "Monte Carlo replicates");
  sub->add_option("--seed", c.seed, "master seed");
  sub->add_option("--out", c.out, "output path (default stdout)");
  sub->add_option("--format", c.format, "json, csv, text or binary");
  sub->add_option("--threads", c.threads, "worker threads (0: hardware)");
  sub->add_option("--grid", c.grid, "comma-separated q values")->delimiter(',');
  sub->add_option("--max-len", c.max_len, "abort excursions longer than this")->check(CLI::PositiveNumber);
  sub->add_option("--excursions", c.excursions, "excursions for the excursion estimator");
  sub->add_option("--h", c.h, "test function: tanh, cosine or all");
  sub->add_option("--xs", c.xs, "comma-separated tail offsets")->delimiter(',');
  sub->add_flag("--exact", c.exact, "enumerate S_n instead of sampling");
  sub->add_option("--count", c.count, "permutations to draw");
  sub->add_flag("--timing", c.timing, "include runtime_ms in the report");
}

std::string describe(const std::string& name) {
  static const std::map<std::string, std::string> text = {
      {"sample", "draw Mallows permutations"},
      {"moments", "descent moments, exact or Monte Carlo"},
      {"typesums", "exact covariance type sums and their bounds"},
      {"sbcheck", "exact check of the size-bias coupling"},
      {"vterm", "Monte Carlo variance term of the coupling"},
      {"tails", "tail frequencies against concentration bounds"},
      {"rho", "excursion estimate of the asymptotic correlation"},
      {"clt", "normal approximation against the smooth-function bound"},
      {"bivariate", "joint behaviour of des(w) and des(w^-1)"},
      {"poisson", "small-q Poisson approximation"},
      {"figure1", "correlation curve over a grid of q"},
  };
  const auto it = text.find(name);
  return it == text.end() ? "" : it->second;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mallows permutation descent experiments"};
  app.require_subcommand(1);
  mallows::RunConfig config;
  for (const auto& name : mallows::command_names()) {
    CLI::App* sub = app.add_subcommand(name, describe(name));
    add_common(sub, config);
    sub->callback([&config, name] { config.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? mallows::kExitOk : mallows::kExitUsage;
  }

  try {
    const mallows::CommandOutput out = mallows::dispatch(config);
    for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
    if (config.out.empty()) {
      std::fwrite(out.body.data(), 1, out.body.size(), stdout);
    } else {
      std::ofstream file(config.out, std::ios::binary);
      if (!file) throw mallows::UsageError("cannot open " + config.out);
      file.write(out.body.data(), static_cast<std::streamsize>(out.body.size()));
    }
    return out.all_pass ? mallows::kExitOk : mallows::kExitCheckFailed;
  } catch (const mallows::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return mallows::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mallows::kExitError;
  }
}
