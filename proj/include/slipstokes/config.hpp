#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slipstokes/core.hpp"

namespace slipstokes {

/// Flat key-value configuration with [section] headers and '#' comments.
/// Keys are addressed as "section.key"; keys before any header have no
/// prefix.  Unknown keys are rejected against the experiment schema.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  std::string get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& dflt) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double dflt) const;
  int get_int_or(const std::string& key, int dflt) const;
  std::vector<double> get_list(const std::string& key) const;  // comma separated

  const std::map<std::string, std::string>& entries() const { return kv_; }
  /// throws Error("config-schema") naming the first key outside the schema
  void check_schema(const std::vector<std::string>& allowed) const;
  std::string echo() const;  // canonical re-serialization

 private:
  std::map<std::string, std::string> kv_;
};

struct ExperimentConfig {
  std::string kind;  // mesh | steady | resolvent-scan | evolve | ns | eigen |
                     // alpha-limit | local-est | full-acceptance
  Config raw;
  std::uint64_t seed = 1;
  int level = 2;
  std::string out_dir = "runs/out";
  int threads = 1;

  static ExperimentConfig load(const std::string& kind, const std::string& config_path,
                               const std::string& out_dir, int threads, int level);
};

/// Allowed keys per experiment kind (the strict schema).
std::vector<std::string> config_schema(const std::string& kind);

}  // namespace slipstokes
