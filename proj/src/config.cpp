// SPDX-License-Identifier: Apache-2.0

#include "oafmtl/config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace oafmtl {

std::string to_bitstring(const Selection& s) {
  std::string out;
  out.reserve(s.size());
  for (auto b : s) out.push_back(b ? '1' : '0');
  return out;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string to_string(CorrelationMode m) {
  return m == CorrelationMode::Uniform ? "uniform" : "empirical";
}
std::string to_string(PlacementLaw p) {
  return p == PlacementLaw::DiskUniform ? "disk_uniform" : "sqrt_scaled";
}
std::string to_string(Partition p) { return p == Partition::Iid ? "iid" : "noniid"; }
std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::AO: return "ao";
    case Strategy::ZeroForcing: return "zf";
    case Strategy::ErrorFree: return "errorfree";
  }
  return "?";
}
Strategy parse_strategy(const std::string& s) {
  if (s == "ao") return Strategy::AO;
  if (s == "zf" || s == "zeroforcing") return Strategy::ZeroForcing;
  if (s == "errorfree" || s == "error_free") return Strategy::ErrorFree;
  throw ConfigError("unknown strategy '" + s + "' (expected ao, zf, errorfree)");
}

int SystemConfig::model_dim() const {
  int d = learning.classes * (learning.feature_dim + 1);
  return d % 2 == 0 ? d : d + 1;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\''))) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

// Raw value: either a scalar token or a list of tokens.
struct RawValue {
  bool is_list = false;
  std::vector<std::string> items;
  int line = 0;
};

RawValue parse_value(const std::string& text, int line) {
  RawValue v;
  v.line = line;
  std::string t = trim(text);
  if (!t.empty() && t.front() == '[') {
    if (t.back() != ']') {
      throw ConfigError("line " + std::to_string(line) + ": unterminated list");
    }
    v.is_list = true;
    std::string body = trim(t.substr(1, t.size() - 2));
    if (!body.empty()) {
      std::stringstream ss(body);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) {
          throw ConfigError("line " + std::to_string(line) + ": empty list element");
        }
        v.items.push_back(unquote(item));
      }
    }
  } else {
    if (t.empty()) throw ConfigError("line " + std::to_string(line) + ": missing value");
    v.items.push_back(unquote(t));
  }
  return v;
}

std::string strip_comment(const std::string& line) {
  bool in_quote = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_quote = !in_quote;
    if (line[i] == '#' && !in_quote) return line.substr(0, i);
  }
  return line;
}

double to_double(const std::string& key, const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
    throw ConfigError("key '" + key + "': expected a number, got '" + s + "'");
  }
  return v;
}

long long to_int(const std::string& key, const std::string& s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + s + "'");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "on" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "off" || s == "no") return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + s + "'");
}

const std::string& scalar(const std::string& key, const RawValue& v) {
  if (v.is_list || v.items.size() != 1) {
    throw ConfigError("key '" + key + "': expected a scalar value");
  }
  return v.items.front();
}

const std::vector<std::string>& list(const std::string& key, const RawValue& v) {
  if (!v.is_list) throw ConfigError("key '" + key + "': expected a list [a, b, ...]");
  return v.items;
}

using Setter = std::function<void(SystemConfig&, const std::string&, const RawValue&)>;

struct KeySpec {
  std::string key;
  std::string unit;
  std::string help;
  Setter set;
};

template <typename T>
Setter int_field(T SystemConfig::*member) {
  return [member](SystemConfig& c, const std::string& k, const RawValue& v) {
    c.*member = static_cast<T>(to_int(k, scalar(k, v)));
  };
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = [] {
    std::vector<KeySpec> t;
    auto add = [&t](std::string key, std::string unit, std::string help, Setter s) {
      t.push_back({std::move(key), std::move(unit), std::move(help), std::move(s)});
    };
    add("seed", "-", "64-bit master seed (default 1)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) {
          const auto& s = scalar(k, v);
          std::uint64_t x = 0;
          auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
          if (ec != std::errc() || p != s.data() + s.size()) {
            throw ConfigError("key 'seed': expected an unsigned integer, got '" + s + "'");
          }
          c.seed = x;
        });
    add("rounds", "-", "communication rounds T (default 100)", int_field(&SystemConfig::rounds));
    add("K", "-", "number of tasks (default 2)", int_field(&SystemConfig::K));
    add("M", "-", "devices per task, list of length K (default [10, 10])",
        [](SystemConfig& c, const std::string& k, const RawValue& v) {
          c.M.clear();
          for (const auto& s : list(k, v)) c.M.push_back(static_cast<int>(to_int(k, s)));
        });
    add("N_T", "-", "antennas per device (default 2)", int_field(&SystemConfig::N_T));
    add("N_R", "-", "antennas at the server (default 8)", int_field(&SystemConfig::N_R));
    add("P0", "W", "per-device transmit power budget (default 1)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) { c.P0 = to_double(k, scalar(k, v)); });
    add("P0_dbm", "dBm", "alternative to P0",
        [](SystemConfig& c, const std::string& k, const RawValue& v) {
          c.P0 = dbm_to_watt(to_double(k, scalar(k, v)));
        });
    add("sigma2", "W", "noise power per complex entry (default 1e-11)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) { c.sigma2 = to_double(k, scalar(k, v)); });
    add("sigma2_dbm", "dBm", "alternative to sigma2 (-80 two-task preset, -60 three-task preset)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) {
          c.sigma2 = dbm_to_watt(to_double(k, scalar(k, v)));
        });
    add("alpha", "-", "path-loss exponent (default 3.8)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) { c.pathloss.alpha = to_double(k, scalar(k, v)); });
    add("kappa", "linear", "path loss at the 1 m reference distance (default 1e-6)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) { c.pathloss.kappa = to_double(k, scalar(k, v)); });
    add("kappa_db", "dB", "alternative to kappa (default -60)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) {
          c.pathloss.kappa = db_to_linear(to_double(k, scalar(k, v)));
        });
    add("G_S", "linear", "server antenna gain (default 10^0.5)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) { c.pathloss.G_S = to_double(k, scalar(k, v)); });
    add("G_S_dbi", "dBi", "alternative to G_S (default 5)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) {
          c.pathloss.G_S = db_to_linear(to_double(k, scalar(k, v)));
        });
    add("G_D", "linear", "device antenna gain (default 1)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) { c.pathloss.G_D = to_double(k, scalar(k, v)); });
    add("G_D_dbi", "dBi", "alternative to G_D (default 0)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) {
          c.pathloss.G_D = db_to_linear(to_double(k, scalar(k, v)));
        });
    add("Delta", "m", "cell radius (default 100)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) { c.pathloss.Delta = to_double(k, scalar(k, v)); });
    add("ps_height", "m", "server antenna height (default 10)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) { c.pathloss.ps_height = to_double(k, scalar(k, v)); });
    add("placement_law", "-", "disk_uniform | sqrt_scaled (default disk_uniform)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) {
          const auto& s = scalar(k, v);
          if (s == "disk_uniform") c.pathloss.placement = PlacementLaw::DiskUniform;
          else if (s == "sqrt_scaled") c.pathloss.placement = PlacementLaw::SqrtScaled;
          else throw ConfigError("key 'placement_law': expected disk_uniform or sqrt_scaled");
        });
    add("eta", "-", "learning rate per task; [] selects eta_scale/omega_k (default [])",
        [](SystemConfig& c, const std::string& k, const RawValue& v) {
          c.learning.eta.clear();
          for (const auto& s : list(k, v)) c.learning.eta.push_back(to_double(k, s));
        });
    add("eta_scale", "-", "fraction of 1/omega_k used when eta is [] (default 0.9)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) { c.learning.eta_scale = to_double(k, scalar(k, v)); });
    add("local_steps", "-", "local updates per round; 1 is one full-batch gradient (default 1)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) {
          c.learning.local_steps = static_cast<int>(to_int(k, scalar(k, v)));
        });
    add("batch_fraction", "-", "mini-batch fraction when local_steps > 1 (default 1)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) { c.learning.batch_fraction = to_double(k, scalar(k, v)); });
    add("lambda", "-", "L2 regularizer (default 1e-3)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) { c.learning.lambda = to_double(k, scalar(k, v)); });
    add("feature_dim", "-", "synthetic feature dimension (default 24)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) {
          c.learning.feature_dim = static_cast<int>(to_int(k, scalar(k, v)));
        });
    add("classes", "-", "classes per synthetic task (default 10)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) {
          c.learning.classes = static_cast<int>(to_int(k, scalar(k, v)));
        });
    add("samples_per_device", "-", "training samples Q per device (default 200)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) {
          c.learning.samples_per_device = static_cast<int>(to_int(k, scalar(k, v)));
        });
    add("test_samples", "-", "held-out samples per task (default 2000)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) {
          c.learning.test_samples = static_cast<int>(to_int(k, scalar(k, v)));
        });
    add("class_sep", "-", "std-dev of class centroids (default 1)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) { c.learning.class_sep = to_double(k, scalar(k, v)); });
    add("partition", "-", "iid | noniid (default iid)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) {
          const auto& s = scalar(k, v);
          if (s == "iid") c.learning.partition = Partition::Iid;
          else if (s == "noniid" || s == "non_iid") c.learning.partition = Partition::NonIid;
          else throw ConfigError("key 'partition': expected iid or noniid");
        });
    add("classes_per_device", "-", "classes drawn by each device in noniid mode (default 5)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) {
          c.learning.classes_per_device = static_cast<int>(to_int(k, scalar(k, v)));
        });
    add("correlation", "-", "uniform | empirical (empirical is the oracle mode; default uniform)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) {
          const auto& s = scalar(k, v);
          if (s == "uniform") c.correlation.mode = CorrelationMode::Uniform;
          else if (s == "empirical") c.correlation.mode = CorrelationMode::Empirical;
          else throw ConfigError("key 'correlation': expected uniform or empirical");
        });
    add("epsilon", "-", "uniform correlation level in [0,1] (default 1)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) { c.correlation.epsilon = to_double(k, scalar(k, v)); });
    add("I_max", "-", "alternating-optimization sweeps (default 50)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) {
          c.optimizer.I_max = static_cast<int>(to_int(k, scalar(k, v)));
        });
    add("rel_tol", "-", "stop when a sweep lowers E by less than this fraction (default 1e-6)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) { c.optimizer.rel_tol = to_double(k, scalar(k, v)); });
    add("refresh_y_per_device", "-", "refresh y after every device update (default false)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) {
          c.optimizer.refresh_y_per_device = to_bool(k, scalar(k, v));
        });
    add("gibbs", "-", "enable Gibbs-sampling device selection (default false)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) { c.gibbs.enabled = to_bool(k, scalar(k, v)); });
    add("J_max", "-", "Gibbs sampling rounds (default 50)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) {
          c.gibbs.J_max = static_cast<int>(to_int(k, scalar(k, v)));
        });
    add("beta0", "-", "initial Gibbs temperature (default 1)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) { c.gibbs.beta0 = to_double(k, scalar(k, v)); });
    add("gamma", "-", "temperature decay per Gibbs round, in (0,1) (default 0.9)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) { c.gibbs.gamma = to_double(k, scalar(k, v)); });
    add("strategies", "-", "strategies to train, subset of [ao, zf, errorfree] (default all)",
        [](SystemConfig& c, const std::string& k, const RawValue& v) {
          c.strategies.clear();
          for (const auto& s : list(k, v)) c.strategies.push_back(parse_strategy(s));
        });
    return t;
  }();
  return table;
}

const KeySpec* find_key(const std::string& key) {
  for (const auto& spec : key_table()) {
    if (spec.key == key) return &spec;
  }
  return nullptr;
}

// Keys that set the same field; at most one per group may appear.
const std::vector<std::pair<std::string, std::string>>& twin_keys() {
  static const std::vector<std::pair<std::string, std::string>> twins{
      {"P0", "P0_dbm"}, {"sigma2", "sigma2_dbm"}, {"kappa", "kappa_db"},
      {"G_S", "G_S_dbi"}, {"G_D", "G_D_dbi"}};
  return twins;
}

std::string twin_of(const std::string& key) {
  for (const auto& [a, b] : twin_keys()) {
    if (key == a) return b;
    if (key == b) return a;
  }
  return {};
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void validate(const SystemConfig& c) {
  auto fail = [](const std::string& what) { throw ConfigError("validation error: " + what); };
  if (c.K < 1) fail("K >= 1");
  if (static_cast<int>(c.M.size()) != c.K) fail("len(M) != K");
  for (int m : c.M) {
    if (m < 1) fail("all M_k >= 1");
  }
  if (c.N_T < 1) fail("N_T >= 1");
  if (c.N_R < 1) fail("N_R >= 1");
  if (!(c.P0 > 0.0)) fail("P0 > 0");
  if (!(c.sigma2 >= 0.0)) fail("sigma2 >= 0");
  if (!(c.pathloss.alpha >= 0.0)) fail("alpha >= 0");
  if (!(c.pathloss.kappa > 0.0)) fail("kappa > 0");
  if (!(c.pathloss.G_S > 0.0) || !(c.pathloss.G_D > 0.0)) fail("antenna gains > 0");
  if (!(c.pathloss.Delta >= 0.0)) fail("Delta >= 0");
  if (!(c.pathloss.ps_height >= 0.0)) fail("ps_height >= 0");
  if (!c.learning.eta.empty()) {
    if (static_cast<int>(c.learning.eta.size()) != c.K) fail("len(eta) != K");
    for (double e : c.learning.eta) {
      if (!(e > 0.0)) fail("eta_k > 0");
    }
  }
  if (!(c.learning.eta_scale > 0.0)) fail("eta_scale > 0");
  if (c.learning.local_steps < 1) fail("local_steps >= 1");
  if (!(c.learning.batch_fraction > 0.0 && c.learning.batch_fraction <= 1.0)) {
    fail("0 < batch_fraction <= 1");
  }
  if (!(c.learning.lambda > 0.0)) fail("lambda > 0");
  if (c.learning.feature_dim < 1) fail("feature_dim >= 1");
  if (c.learning.classes < 2) fail("classes >= 2");
  if (c.learning.samples_per_device < 1) fail("samples_per_device >= 1");
  if (c.learning.test_samples < 0) fail("test_samples >= 0");
  if (!(c.learning.class_sep >= 0.0)) fail("class_sep >= 0");
  if (c.learning.classes_per_device < 1 || c.learning.classes_per_device > c.learning.classes) {
    fail("1 <= classes_per_device <= classes");
  }
  if (!(c.correlation.epsilon >= 0.0 && c.correlation.epsilon <= 1.0)) fail("0 <= epsilon <= 1");
  if (c.optimizer.I_max < 0) fail("I_max >= 0");
  if (!(c.optimizer.rel_tol >= 0.0)) fail("rel_tol >= 0");
  if (c.gibbs.J_max < 0) fail("J_max >= 0");
  if (!(c.gibbs.beta0 > 0.0)) fail("beta0 > 0");
  if (!(c.gibbs.gamma > 0.0 && c.gibbs.gamma < 1.0)) fail("0 < gamma < 1");
  if (c.rounds < 0) fail("rounds >= 0");
  if (c.strategies.empty()) fail("strategies nonempty");
}

SystemConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  std::vector<std::pair<std::string, RawValue>> entries;
  auto find_entry = [&entries](const std::string& key) {
    return std::find_if(entries.begin(), entries.end(),
                        [&key](const auto& e) { return e.first == key; });
  };

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(strip_comment(line));
    if (t.empty()) continue;
    if (t.front() == '[' && t.find('=') == std::string::npos) {
      if (t.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
      continue;  // section headers only group keys visually
    }
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!find_key(key)) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (find_entry(key) != entries.end()) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    std::string twin = twin_of(key);
    if (!twin.empty() && find_entry(twin) != entries.end()) {
      throw ConfigError("line " + std::to_string(lineno) + ": '" + key + "' conflicts with '" + twin + "'");
    }
    entries.emplace_back(key, parse_value(t.substr(eq + 1), lineno));
  }

  for (const auto& ov : overrides) {
    auto eq = ov.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + ov + "': expected key=value");
    std::string key = trim(ov.substr(0, eq));
    if (!find_key(key)) throw ConfigError("override: unknown key '" + key + "'");
    RawValue v = parse_value(ov.substr(eq + 1), 0);
    std::string twin = twin_of(key);
    if (!twin.empty()) {
      auto it = find_entry(twin);
      if (it != entries.end()) entries.erase(it);
    }
    auto it = find_entry(key);
    if (it != entries.end()) it->second = v;
    else entries.emplace_back(key, v);
  }

  SystemConfig cfg;
  // Apply in table order so results do not depend on file order.
  for (const auto& spec : key_table()) {
    auto it = find_entry(spec.key);
    if (it != entries.end()) spec.set(cfg, spec.key, it->second);
  }
  validate(cfg);
  return cfg;
}

SystemConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::string serialize(const SystemConfig& c) {
  std::ostringstream o;
  auto ints = [](const std::vector<int>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
    return s + "]";
  };
  auto dbls = [](const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s + "]";
  };
  o << "seed = " << c.seed << "\n";
  o << "rounds = " << c.rounds << "\n";
  o << "K = " << c.K << "\n";
  o << "M = " << ints(c.M) << "\n";
  o << "N_T = " << c.N_T << "\n";
  o << "N_R = " << c.N_R << "\n";
  o << "P0 = " << fmt(c.P0) << "\n";
  o << "sigma2 = " << fmt(c.sigma2) << "\n";
  o << "alpha = " << fmt(c.pathloss.alpha) << "\n";
  o << "kappa = " << fmt(c.pathloss.kappa) << "\n";
  o << "G_S = " << fmt(c.pathloss.G_S) << "\n";
  o << "G_D = " << fmt(c.pathloss.G_D) << "\n";
  o << "Delta = " << fmt(c.pathloss.Delta) << "\n";
  o << "ps_height = " << fmt(c.pathloss.ps_height) << "\n";
  o << "placement_law = " << to_string(c.pathloss.placement) << "\n";
  o << "eta = " << dbls(c.learning.eta) << "\n";
  o << "eta_scale = " << fmt(c.learning.eta_scale) << "\n";
  o << "local_steps = " << c.learning.local_steps << "\n";
  o << "batch_fraction = " << fmt(c.learning.batch_fraction) << "\n";
  o << "lambda = " << fmt(c.learning.lambda) << "\n";
  o << "feature_dim = " << c.learning.feature_dim << "\n";
  o << "classes = " << c.learning.classes << "\n";
  o << "samples_per_device = " << c.learning.samples_per_device << "\n";
  o << "test_samples = " << c.learning.test_samples << "\n";
  o << "class_sep = " << fmt(c.learning.class_sep) << "\n";
  o << "partition = " << to_string(c.learning.partition) << "\n";
  o << "classes_per_device = " << c.learning.classes_per_device << "\n";
  o << "correlation = " << to_string(c.correlation.mode) << "\n";
  o << "epsilon = " << fmt(c.correlation.epsilon) << "\n";
  o << "I_max = " << c.optimizer.I_max << "\n";
  o << "rel_tol = " << fmt(c.optimizer.rel_tol) << "\n";
  o << "refresh_y_per_device = " << (c.optimizer.refresh_y_per_device ? "true" : "false") << "\n";
  o << "gibbs = " << (c.gibbs.enabled ? "true" : "false") << "\n";
  o << "J_max = " << c.gibbs.J_max << "\n";
  o << "beta0 = " << fmt(c.gibbs.beta0) << "\n";
  o << "gamma = " << fmt(c.gibbs.gamma) << "\n";
  o << "strategies = [";
  for (std::size_t i = 0; i < c.strategies.size(); ++i) o << (i ? ", " : "") << to_string(c.strategies[i]);
  o << "]\n";
  return o.str();
}

std::uint64_t config_hash(const SystemConfig& cfg) { return fnv1a64(serialize(cfg)); }

std::string config_schema() {
  std::ostringstream o;
  o << "Config keys (flat `key = value`, '#' comments, [section] headers ignored):\n";
  for (const auto& spec : key_table()) {
    o << "  " << spec.key;
    for (std::size_t i = spec.key.size(); i < 22; ++i) o << ' ';
    o << "[" << spec.unit << "] " << spec.help << "\n";
  }
  return o.str();
}

}  // namespace oafmtl
