#include "slipstokes/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace slipstokes {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("config-schema", "cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_string(ss.str());
}

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw Error("config-schema", "malformed section at line " + std::to_string(lineno));
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw Error("config-schema", "expected key = value at line " + std::to_string(lineno));
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (key.empty())
      throw Error("config-schema", "empty key at line " + std::to_string(lineno));
    std::string full = section.empty() ? key : section + "." + key;
    if (cfg.kv_.count(full))
      throw Error("config-schema", "duplicate key " + full);
    cfg.kv_[full] = val;
  }
  return cfg;
}

std::string Config::get(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw Error("config-schema", "missing required key " + key);
  return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& dflt) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? dflt : it->second;
}

double Config::get_double(const std::string& key) const {
  try {
    return std::stod(get(key));
  } catch (const std::invalid_argument&) {
    throw Error("config-schema", "key " + key + " is not a number");
  }
}

double Config::get_double_or(const std::string& key, double dflt) const {
  return has(key) ? get_double(key) : dflt;
}

int Config::get_int_or(const std::string& key, int dflt) const {
  return has(key) ? int(std::llround(get_double(key))) : dflt;
}

std::vector<double> Config::get_list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(get(key));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(trim(tok)));
    } catch (const std::invalid_argument&) {
      throw Error("config-schema", "key " + key + " holds a non-numeric entry");
    }
  }
  return out;
}

void Config::check_schema(const std::vector<std::string>& allowed) const {
  for (const auto& [key, val] : kv_) {
    (void)val;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw Error("config-schema", "unknown key \"" + key + "\"");
  }
}

std::string Config::echo() const {
  std::ostringstream os;
  for (const auto& [key, val] : kv_) os << key << " = " << val << "\n";
  return os.str();
}

std::vector<std::string> config_schema(const std::string& kind) {
  std::vector<std::string> common = {
      "domain.kind",   "domain.radius", "domain.inner_radius", "domain.outer_radius",
      "domain.length", "domain.height", "mesh.h",              "alpha.value",
      "alpha.default", "run.seed",      "run.name",
  };
  auto add = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys) common.push_back(k);
  };
  if (kind == "mesh") {
    // geometry only
  } else if (kind == "steady") {
    add({"forcing.kind", "steady.filter_kernel"});
  } else if (kind == "resolvent-scan") {
    add({"scan.rays", "scan.lambda_min", "scan.lambda_max", "scan.points_per_decade",
         "scan.alphas", "forcing.kind"});
  } else if (kind == "evolve" || kind == "ns") {
    add({"scheme.theta", "scheme.dt", "scheme.T", "initial.kind", "evolve.kernel_filter"});
  } else if (kind == "eigen") {
    add({"eigen.count", "eigen.alphas"});
  } else if (kind == "alpha-limit") {
    add({"sweep.kind", "sweep.alphas", "scheme.theta", "scheme.dt", "scheme.T",
         "initial.kind", "sweep.floor"});
  } else if (kind == "local-est") {
    add({"probe.exponents", "probe.lambdas"});
  } else if (kind == "full-acceptance") {
    // fixed protocol; only common keys apply
  } else {
    throw Error("config-schema", "unknown experiment kind \"" + kind + "\"");
  }
  return common;
}

ExperimentConfig ExperimentConfig::load(const std::string& kind,
                                        const std::string& config_path,
                                        const std::string& out_dir, int threads,
                                        int level) {
  ExperimentConfig ec;
  ec.kind = kind;
  ec.raw = config_path.empty() ? Config{} : Config::parse_file(config_path);
  ec.raw.check_schema(config_schema(kind));
  ec.seed = std::uint64_t(ec.raw.get_int_or("run.seed", 1));
  ec.out_dir = out_dir;
  ec.threads = threads;
  ec.level = level;
  return ec;
}

}  // namespace slipstokes
