#include "dynint/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "dynint/analysis.hpp"

extern char** environ;

namespace dynint {
namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"scenario", {"name", "seed"}},
      {"graph",
       {"kind", "n", "t", "edges", "p_init", "p_birth", "p_death", "v_max",
        "kappa"}},
      {"environment",
       {"family", "n_states", "t_mix", "sigma", "kernel_own_weight"}},
      {"design", {"block_len", "partition", "cell_side"}},
      {"estimator", {"r"}},
      {"oracle", {"mode", "replications", "budget", "rao_blackwell", "jobs"}},
      {"output", {"dir", "pair_table"}},
      {"sweep", {"axis", "values", "grid_n", "grid_t"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

class Reader {
 public:
  explicit Reader(const std::map<std::string, std::string>& raw) : raw_(raw) {}

  const std::string* find(const std::string& key) const {
    const auto it = raw_.find(key);
    return it == raw_.end() ? nullptr : &it->second;
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    const auto* v = find(key);
    return v ? *v : fallback;
  }

  long long integer(const std::string& key, long long fallback) const {
    const auto* v = find(key);
    return v ? parse_int(key, *v) : fallback;
  }

  double real(const std::string& key, double fallback) const {
    const auto* v = find(key);
    return v ? parse_real(key, *v) : fallback;
  }

  bool flag(const std::string& key, bool fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    const std::string s = lower(*v);
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw ConfigError(key, "expected a boolean, got '" + *v + "'");
  }

  // nullopt for AUTO.
  std::optional<int> auto_int(const std::string& key,
                              std::optional<int> fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    if (lower(*v) == "auto") return std::nullopt;
    return static_cast<int>(parse_int(key, *v));
  }

  std::vector<std::string> list(const std::string& key) const {
    std::vector<std::string> out;
    const auto* v = find(key);
    if (!v) return out;
    std::string s = *v;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
  }

  static long long parse_int(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    long long out = 0;
    try {
      out = std::stoll(v, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != v.size()) {
      throw ConfigError(key, "expected an integer, got '" + v + "'");
    }
    return out;
  }

  static double parse_real(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double out = 0.0;
    try {
      out = std::stod(v, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != v.size()) {
      throw ConfigError(key, "expected a number, got '" + v + "'");
    }
    return out;
  }

 private:
  const std::map<std::string, std::string>& raw_;
};

void require(bool ok, const std::string& key, const std::string& message) {
  if (!ok) throw ConfigError(key, message);
}

void check_choice(const std::string& key, const std::string& value,
                  std::initializer_list<const char*> choices) {
  for (const char* c : choices) {
    if (value == c) return;
  }
  std::string all;
  for (const char* c : choices) all += std::string(all.empty() ? "" : "|") + c;
  throw ConfigError(key, "unknown value '" + value + "' (expected " + all + ")");
}

ExperimentConfig resolve(std::map<std::string, std::string> raw) {
  for (const auto& [key, value] : raw) {
    const auto dot = key.find('.');
    const std::string section = key.substr(0, dot);
    const auto it = schema().find(section);
    if (it == schema().end()) {
      throw ConfigError(section, "unknown section");
    }
    if (dot == std::string::npos || !it->second.count(key.substr(dot + 1))) {
      throw ConfigError(key, "unknown key");
    }
  }
  ExperimentConfig cfg;
  const Reader r(raw);
  cfg.name = r.text("scenario.name", cfg.name);
  const long long seed = r.integer("scenario.seed", 1);
  require(seed >= 0, "scenario.seed", "must be non-negative");
  cfg.seed = static_cast<std::uint64_t>(seed);

  auto& g = cfg.graph;
  g.kind = r.text("graph.kind", g.kind);
  check_choice("graph.kind", g.kind,
               {"static", "edgeless", "complete", "dynamic_er", "metric"});
  g.n = static_cast<int>(r.integer("graph.n", g.n));
  g.horizon = static_cast<int>(r.integer("graph.t", g.horizon));
  require(g.n >= 1, "graph.n", "must be >= 1");
  require(g.horizon >= 1, "graph.t", "must be >= 1");
  for (const auto& tok : r.list("graph.edges")) {
    const auto dash = tok.find('-');
    require(dash != std::string::npos, "graph.edges",
            "pairs are written i-j, got '" + tok + "'");
    const int a = static_cast<int>(
        Reader::parse_int("graph.edges", tok.substr(0, dash)));
    const int b = static_cast<int>(
        Reader::parse_int("graph.edges", tok.substr(dash + 1)));
    require(a >= 1 && b >= 1 && a <= g.n && b <= g.n && a != b, "graph.edges",
            "pair '" + tok + "' out of range");
    g.edges.push_back({a - 1, b - 1});
  }
  g.er.p_init = r.real("graph.p_init", g.er.p_init);
  g.er.p_birth = r.real("graph.p_birth", g.er.p_birth);
  g.er.p_death = r.real("graph.p_death", g.er.p_death);
  for (const char* key : {"graph.p_init", "graph.p_birth", "graph.p_death"}) {
    const double v = r.real(key, 0.0);
    require(v >= 0.0 && v <= 1.0, key, "must lie in [0, 1]");
  }
  g.v_max = r.real("graph.v_max", g.v_max);
  g.kappa = r.real("graph.kappa", g.kappa);
  require(g.v_max >= 0.0, "graph.v_max", "must be >= 0");
  require(g.kappa >= 0.0, "graph.kappa", "must be >= 0");

  auto& e = cfg.env;
  e.family = r.text("environment.family", e.family);
  check_choice("environment.family", e.family,
               {"random", "own_arm", "tracking", "null"});
  e.n_states = static_cast<int>(r.integer("environment.n_states", e.n_states));
  require(e.n_states >= 1 && e.n_states <= kMaxStates, "environment.n_states",
          "must lie in [1, " + std::to_string(kMaxStates) + "]");
  require(r.find("environment.t_mix") != nullptr, "t_mix",
          "missing required key t_mix in section [environment]");
  e.t_mix = r.real("environment.t_mix", 1.0);
  require(e.t_mix > 0.0, "t_mix", "must be > 0");
  e.sigma = r.real("environment.sigma", e.sigma);
  require(e.sigma >= 0.0, "environment.sigma", "must be >= 0");
  e.kernel_own_weight =
      r.real("environment.kernel_own_weight", e.kernel_own_weight);
  require(e.kernel_own_weight >= 0.0 && e.kernel_own_weight <= 1.0,
          "environment.kernel_own_weight", "must lie in [0, 1]");

  auto& d = cfg.design;
  d.block_len = r.auto_int("design.block_len", std::nullopt);
  require(!d.block_len || *d.block_len >= 1, "design.block_len",
          "must be >= 1 or AUTO");
  d.partition = r.text("design.partition", d.partition);
  check_choice("design.partition", d.partition,
               {"singleton", "single", "grid", "components"});
  require(d.partition != "grid" || g.kind == "metric", "design.partition",
          "grid partitions need graph.kind = metric");
  d.cell_side = r.real("design.cell_side", d.cell_side);
  require(d.cell_side > 0.0, "design.cell_side", "must be > 0");

  cfg.radius = r.auto_int("estimator.r", std::nullopt);
  require(!cfg.radius || *cfg.radius >= 0, "estimator.r", "must be >= 0 or AUTO");

  auto& o = cfg.oracle;
  const std::string mode = r.text("oracle.mode", "EXACT");
  check_choice("oracle.mode", mode, {"EXACT", "MC"});
  o.mode = mode == "EXACT" ? OracleMode::kExact : OracleMode::kMonteCarlo;
  o.replications = static_cast<long>(r.integer("oracle.replications", 1000));
  require(o.replications >= 2, "oracle.replications", "must be >= 2");
  o.budget = static_cast<int>(r.integer("oracle.budget", o.budget));
  require(o.budget >= 0 && o.budget <= 40, "oracle.budget",
          "must lie in [0, 40]");
  o.rao_blackwell = r.flag("oracle.rao_blackwell", false);
  o.jobs = static_cast<int>(r.integer("oracle.jobs", 1));
  require(o.jobs >= 1, "oracle.jobs", "must be >= 1");

  cfg.output.dir = r.text("output.dir", cfg.output.dir);
  cfg.output.pair_table = r.flag("output.pair_table", false);

  auto& s = cfg.sweep;
  s.axis = r.text("sweep.axis", "");
  for (const auto& tok : r.list("sweep.values")) {
    s.values.push_back(Reader::parse_real("sweep.values", tok));
  }
  for (const auto& tok : r.list("sweep.grid_n")) {
    s.grid_n.push_back(static_cast<int>(Reader::parse_int("sweep.grid_n", tok)));
    require(s.grid_n.back() >= 1, "sweep.grid_n", "entries must be >= 1");
  }
  for (const auto& tok : r.list("sweep.grid_t")) {
    s.grid_t.push_back(static_cast<int>(Reader::parse_int("sweep.grid_t", tok)));
    require(s.grid_t.back() >= 1, "sweep.grid_t", "entries must be >= 1");
  }
  cfg.raw = std::move(raw);
  return cfg;
}

}  // namespace

int ExperimentConfig::resolved_block_len() const {
  return design.block_len ? *design.block_len
                          : auto_radius(env.t_mix, graph.n, graph.horizon);
}

int ExperimentConfig::resolved_radius() const {
  return radius ? *radius : auto_radius(env.t_mix, graph.n, graph.horizon);
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [key, value] : raw) {
    // Neither changes any result.
    if (key == "output.dir" || key == "oracle.jobs") continue;
    feed(key);
    feed("=");
    feed(value);
    feed("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Overrides environment_overrides() {
  Overrides out;
  const std::string prefix = "DYNINT_";
  for (char** env = environ; env && *env; ++env) {
    const std::string entry = *env;
    if (entry.rfind(prefix, 0) != 0) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    const std::string name = lower(entry.substr(prefix.size(), eq - prefix.size()));
    const auto us = name.find('_');
    if (us == std::string::npos) continue;
    out[name.substr(0, us) + "." + name.substr(us + 1)] = entry.substr(eq + 1);
  }
  return out;
}

ExperimentConfig parse_config(std::istream& is, const Overrides& overrides) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", e.message() + " at line " +
                                    std::to_string(e.line()));
  }
  std::map<std::string, std::string> raw;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError(section, "keys must appear inside a [section]");
    }
    for (const auto& [key, value] : body) {
      raw[lower(section) + "." + lower(key)] = trim(value.data());
    }
  }
  for (const auto& [key, value] : overrides) raw[key] = trim(value);
  return resolve(std::move(raw));
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  return parse_config(in, overrides);
}

ExperimentConfig with_value(const ExperimentConfig& cfg, const std::string& key,
                            const std::string& value) {
  auto raw = cfg.raw;
  raw[key] = value;
  return resolve(std::move(raw));
}

}  // namespace dynint
