#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>

#include "gtsi/errors.hpp"

namespace gtsi {

// Flat key = value config files. '#' starts a comment, blank lines ignored.
// Parsing is strict: a key not consumed by the reader is an error, so typos
// fail fast instead of silently running defaults.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::filesystem::path& path);
  static KeyValueConfig parse_text(const std::string& text, const std::string& origin);

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  // typed getters; mark the key consumed
  std::string get_string(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key, double fallback);
  long get_long(const std::string& key, long fallback);
  bool get_bool(const std::string& key, bool fallback);

  // required variants (no fallback)
  std::string req_string(const std::string& key);
  double req_double(const std::string& key);
  long req_long(const std::string& key);

  // throws ConfigError listing any unconsumed keys
  void finish() const;

  // canonical "key=value\n" text with keys sorted; basis for the digest
  std::string canonical_text() const;

 private:
  std::string take(const std::string& key);
  std::string origin_;
  std::map<std::string, std::string> values_;
  std::set<std::string> consumed_;
};

// 64-bit FNV-1a over the canonical text, hex encoded. Stable under key
// reordering and comment/whitespace changes.
std::string config_digest(const KeyValueConfig& cfg);

}  // namespace gtsi
