#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace mallows {

// Parsed command line for one run. Unset optionals fall back to the
// per-command defaults.
struct RunConfig {
  std::string command;
  std::optional<std::size_t> n;
  std::optional<double> q;
  std::optional<std::size_t> reps;
  std::uint64_t seed = 0;
  std::string out;  // empty: stdout
  std::optional<std::string> format;
  unsigned threads = 0;
  std::vector<double> grid;
  std::uint64_t max_len = 1'000'000;
  std::size_t excursions = 10'000;
  std::string h = "all";
  std::vector<double> xs;
  bool exact = false;
  std::size_t count = 1;
  bool timing = false;
};

inline constexpr std::size_t kDefaultReps = 10'000;

struct ExperimentReport {
  std::string command;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  nlohmann::json results = nlohmann::json::object();
  nlohmann::json bounds = nlohmann::json::object();
  std::map<std::string, bool> pass;
  std::vector<std::string> notes;
  std::optional<double> runtime_ms;

  [[nodiscard]] bool all_pass() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

// Throws UsageError describing the first schema violation.
void validate_report(const nlohmann::json& report);

// What a run produced: the bytes to write, whether every pass flag held, and
// warnings for stderr.
struct CommandOutput {
  std::string body;
  bool all_pass = true;
  std::vector<std::string> warnings;
  std::optional<ExperimentReport> report;
};

const std::vector<std::string>& command_names();

// Routes a config to the library. Throws UsageError for bad flag
// combinations; library errors propagate.
CommandOutput dispatch(const RunConfig& config);

// Exit statuses used by the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitError = 3;

}  // namespace mallows
