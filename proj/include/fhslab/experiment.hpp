#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fhslab/bubble.hpp"

namespace fhs {

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

// Flat key = value file. Keys before the first [section] are shared; a
// section named after an experiment holds that experiment's keys.
//
//   N = 2
//   s = 0.75
//   t = 0.5
//   experiment = spectrum
//   [spectrum]
//   k = 5
struct ExperimentConfig {
  std::string source;  // file name used in messages
  std::vector<ConfigEntry> shared;
  std::map<std::string, std::vector<ConfigEntry>> sections;

  const ConfigEntry* find(std::string_view key, std::string_view section = {}) const;
  // Canonical text form: shared keys, then sections in name order.
  std::string echo() const;
};

ExperimentConfig parse_config(std::string_view text, const std::string& source);
ExperimentConfig load_config(const std::string& path);

const std::vector<std::string>& experiment_names();

struct RunOptions {
  std::string out_dir = ".";
  std::string experiment;  // overrides the config's experiment key when set
  std::optional<std::uint64_t> seed;
  int threads = 0;          // 0: config value, else 1
  std::string cache_dir;    // empty: FHSLAB_CACHE_DIR, then <out_dir>/cache
};

struct RunResult {
  std::string experiment;
  std::vector<std::string> outputs;  // files written, manifest last
  std::vector<std::string> warnings;
  bool cache_hit = false;
  double wall_time = 0.0;
};

// Validates the whole config, runs the experiment and writes its table, extra
// artifacts and manifest.txt into out_dir. Validation errors are config_error
// with "<source>:<line>: " in front.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& opts);

struct CacheLookup {
  std::shared_ptr<const Bubble> bubble;
  bool hit = false;
  std::string path;
  std::vector<std::string> warnings;
};

// Bubble keyed on (N, s, t, r_min, r_max, n, tol) under cache_dir, guarded by
// an advisory lock. Unreadable or mismatched entries are recomputed.
CacheLookup cached_bubble(const std::string& cache_dir, const Params& params, GridPtr grid,
                          double tol);
std::string bubble_cache_name(const Params& params, const RadialGrid& grid, double tol);

const char* library_version();

}  // namespace fhs
