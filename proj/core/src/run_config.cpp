#include "skipdisk/run_config.hpp"

#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "skipdisk/common.hpp"

extern char** environ;

namespace skipdisk {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Strips a trailing comment: '#' at line start or preceded by whitespace.
std::string_view strip_comment(std::string_view line) {
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] != '#') continue;
    if (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1]))) {
      return line.substr(0, i);
    }
  }
  return line;
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!(std::islower(static_cast<unsigned char>(c)) ||
          std::isdigit(static_cast<unsigned char>(c)) || c == '_' ||
          c == '.')) {
      return false;
    }
  }
  return true;
}

constexpr int kMaxIncludeDepth = 16;

void parse_into(RunConfig* config, const std::string& text,
                const std::string& base_dir, const std::string& origin,
                int depth);

void load_into(RunConfig* config, const std::string& path, int depth) {
  if (depth > kMaxIncludeDepth) {
    throw ConfigError("config include depth exceeded at " + path +
                      " (cycle?)");
  }
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config file " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    throw IoError("failed reading config file " + path);
  }
  std::string dir = std::filesystem::path(path).parent_path().string();
  parse_into(config, buf.str(), dir.empty() ? "." : dir, path, depth);
}

void parse_into(RunConfig* config, const std::string& text,
                const std::string& base_dir, const std::string& origin,
                int depth) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line.rfind("include", 0) == 0 &&
        (line.size() == 7 ||
         std::isspace(static_cast<unsigned char>(line[7])))) {
      std::string target = trim(std::string_view(line).substr(7));
      if (target.empty()) {
        throw ConfigError(origin + ":" + std::to_string(line_no) +
                          ": include without a path");
      }
      std::filesystem::path p(target);
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      load_into(config, p.string(), depth + 1);
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": expected key=value, got '" + line + "'");
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!valid_key(key)) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": invalid key '" + key + "'");
    }
    config->set(key, std::move(value));
  }
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* type) {
  throw ConfigError("config key '" + key + "': cannot parse '" + value +
                    "' as " + type);
}

}  // namespace

void RunConfig::set(const std::string& key, std::string value) {
  values_[key] = std::move(value);
}

std::optional<std::string> RunConfig::find(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string RunConfig::get_string(const std::string& key,
                                  std::string fallback) const {
  auto v = find(key);
  return v ? *v : std::move(fallback);
}

std::int64_t RunConfig::get_i64(const std::string& key,
                                std::int64_t fallback) const {
  auto v = find(key);
  if (!v) return fallback;
  std::int64_t out = 0;
  const char* first = v->data();
  const char* last = v->data() + v->size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) bad_value(key, *v, "integer");
  return out;
}

std::uint64_t RunConfig::get_u64(const std::string& key,
                                 std::uint64_t fallback) const {
  auto v = find(key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  const char* first = v->data();
  const char* last = v->data() + v->size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    bad_value(key, *v, "unsigned integer");
  }
  return out;
}

std::uint32_t RunConfig::get_u32(const std::string& key,
                                 std::uint32_t fallback) const {
  std::uint64_t wide = get_u64(key, fallback);
  if (wide > 0xffffffffull) {
    bad_value(key, *find(key), "32-bit unsigned integer");
  }
  return static_cast<std::uint32_t>(wide);
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  auto v = find(key);
  if (!v) return fallback;
  if (v->empty()) bad_value(key, *v, "number");
  errno = 0;
  char* end = nullptr;
  double out = std::strtod(v->c_str(), &end);
  if (errno != 0 || end != v->c_str() + v->size()) {
    bad_value(key, *v, "number");
  }
  return out;
}

float RunConfig::get_float(const std::string& key, float fallback) const {
  return static_cast<float>(get_double(key, fallback));
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  auto v = find(key);
  if (!v) return fallback;
  std::string low;
  low.reserve(v->size());
  for (char c : *v) {
    low.push_back(
        static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (low == "1" || low == "true" || low == "yes" || low == "on") return true;
  if (low == "0" || low == "false" || low == "no" || low == "off") {
    return false;
  }
  bad_value(key, *v, "boolean");
}

RunConfig load_run_config(const std::string& path) {
  RunConfig config;
  load_into(&config, path, 0);
  return config;
}

RunConfig parse_run_config(const std::string& text,
                           const std::string& base_dir) {
  RunConfig config;
  parse_into(&config, text, base_dir, "<string>", 0);
  return config;
}

void apply_env_overrides(RunConfig* config) {
  constexpr const char* kPrefix = "SKIPDISK_";
  constexpr std::size_t kPrefixLen = 9;
  for (char** env = environ; env != nullptr && *env != nullptr; ++env) {
    const char* entry = *env;
    if (std::strncmp(entry, kPrefix, kPrefixLen) != 0) continue;
    const char* eq = std::strchr(entry, '=');
    if (eq == nullptr || eq == entry + kPrefixLen) continue;
    std::string key(entry + kPrefixLen, eq);
    for (char& c : key) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (!valid_key(key)) continue;
    config->set(key, std::string(eq + 1));
  }
}

}  // namespace skipdisk
