#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mdlamp/protocol.hpp"

namespace mdlamp {

/// Flat "key = value" file: '#' starts a comment, blank lines are skipped,
/// keys are dotted (e.g. source.mu_min), duplicates are rejected.
class KeyValueFile {
 public:
  static KeyValueFile parse_file(const std::string& path);
  static KeyValueFile parse_string(std::string_view text);

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;  // throws when missing
  std::string get_or(const std::string& key, std::string fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;

  /// Throws (naming the offender) when the file holds a key outside
  /// `allowed` -- unknown keys are rejected, not ignored.
  void require_known_keys(const std::vector<std::string>& allowed) const;

 private:
  std::map<std::string, std::string> entries_;
};

/// "a,b,c" as explicit values or "start:stop:count" as an inclusive grid.
std::vector<double> parse_value_grid(const std::string& text);

struct SimulateConfig {
  std::uint64_t seed;
  SourceModel source;
  DeviceModel device;
  EatParams eat;
  ExtractorConfig ext;
  bool write_transcript;
};

struct RateConfig {
  // Raw zipped (mu_min, mu_max) pairs in row order; validated per row so an
  // infeasible pair yields a status row instead of rejecting the whole sweep.
  std::vector<std::pair<double, double>> mu;
  std::vector<double> s_exp;  // inner sweep
  double n, delta_est, eps_s, eps_ea;
};

struct OptimizeConfig {
  MdlParams params;
  OptimizerConfig optimizer;
};

SimulateConfig parse_simulate_config(const KeyValueFile& kv);
RateConfig parse_rate_config(const KeyValueFile& kv);
OptimizeConfig parse_optimize_config(const KeyValueFile& kv);

}  // namespace mdlamp
