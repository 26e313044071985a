#pragma once

// Flat key=value run configuration.  Files may pull in other files with
// `include <path>` (resolved relative to the including file); assignments
// seen later override earlier ones, and environment variables prefixed
// SKIPDISK_ override the file.  Command-line flags are applied last by
// the caller and win over everything here.

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace skipdisk {

class RunConfig {
 public:
  RunConfig() = default;

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value);

  // Missing keys yield the fallback; present keys that fail to parse as
  // the requested type throw ConfigError.
  std::string get_string(const std::string& key, std::string fallback) const;
  std::int64_t get_i64(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::uint32_t get_u32(const std::string& key, std::uint32_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  float get_float(const std::string& key, float fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  std::optional<std::string> find(const std::string& key) const;

  // Deterministic (sorted) view for dumps and tests.
  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Parses a config file, following `include` directives (depth-limited to
// catch cycles).  Throws ConfigError on malformed lines, IoError when a
// file cannot be read.
RunConfig load_run_config(const std::string& path);

// Parses config text directly; `base_dir` anchors relative includes.
RunConfig parse_run_config(const std::string& text,
                           const std::string& base_dir);

// Applies SKIPDISK_* environment variables on top of `config`: the
// prefix is stripped and the remainder lowercased, so SKIPDISK_D_LB
// overrides key "d_lb".
void apply_env_overrides(RunConfig* config);

}  // namespace skipdisk
