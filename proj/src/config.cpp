#include "clicksim/config.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "clicksim/errors.hpp"

namespace clicksim {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

// Raw key/value pairs per section, with source lines for error messages.
struct RawConfig {
  std::string path;
  std::map<std::string, std::map<std::string, Entry>> sections;

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(path + ":" + std::to_string(line) + ": " + msg);
  }

  const Entry* find(const std::string& sec, const std::string& key) {
    auto s = sections.find(sec);
    if (s == sections.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    k->second.used = true;
    return &k->second;
  }

  double get_double(const std::string& sec, const std::string& key,
                    double fallback) {
    const Entry* e = find(sec, key);
    if (!e) return fallback;
    try {
      std::size_t pos = 0;
      const double v = std::stod(e->value, &pos);
      if (pos != e->value.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      fail(e->line, "[" + sec + "] " + key + ": '" + e->value +
                        "' is not a number");
    }
  }

  std::int64_t get_int(const std::string& sec, const std::string& key,
                       std::int64_t fallback) {
    const Entry* e = find(sec, key);
    if (!e) return fallback;
    try {
      std::size_t pos = 0;
      const std::int64_t v = std::stoll(e->value, &pos);
      if (pos != e->value.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      fail(e->line, "[" + sec + "] " + key + ": '" + e->value +
                        "' is not an integer");
    }
  }

  bool get_bool(const std::string& sec, const std::string& key,
                bool fallback) {
    const Entry* e = find(sec, key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "1") return true;
    if (e->value == "false" || e->value == "0") return false;
    fail(e->line, "[" + sec + "] " + key + ": expected true or false, got '" +
                      e->value + "'");
  }

  std::vector<double> get_list(const std::string& sec, const std::string& key,
                               std::vector<double> fallback) {
    const Entry* e = find(sec, key);
    if (!e) return fallback;
    std::vector<double> out;
    std::stringstream ss(e->value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      try {
        std::size_t pos = 0;
        out.push_back(std::stod(item, &pos));
        if (pos != item.size()) throw std::invalid_argument("");
      } catch (...) {
        fail(e->line, "[" + sec + "] " + key + ": '" + item +
                          "' is not a number");
      }
    }
    if (out.empty())
      fail(e->line, "[" + sec + "] " + key + ": empty list");
    return out;
  }
};

RawConfig read_raw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  RawConfig raw;
  raw.path = path;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') raw.fail(line_no, "unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section != "source" && section != "network" &&
          section != "detector" && section != "engine")
        raw.fail(line_no, "unknown section [" + section + "]");
      raw.sections[section];
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      raw.fail(line_no, "expected key = value, got '" + t + "'");
    if (section.empty())
      raw.fail(line_no, "key outside of any [section]");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) raw.fail(line_no, "empty key");
    auto [it, inserted] = raw.sections[section].emplace(
        key, Entry{value, line_no, false});
    if (!inserted)
      raw.fail(line_no, "duplicate key '" + key + "' in [" + section + "]");
  }
  return raw;
}

const std::map<std::string, StateFamily> kFamilies = {
    {"coherent", StateFamily::Coherent},
    {"thermal", StateFamily::Thermal},
    {"fock", StateFamily::Fock},
    {"odd_coherent", StateFamily::OddCoherent},
    {"spats", StateFamily::Spats},
};

}  // namespace

ExperimentConfig parse_config_file(const std::string& path) {
  RawConfig raw = read_raw(path);
  ExperimentConfig cfg;

  // [source]
  if (const Entry* e = raw.find("source", "family")) {
    auto it = kFamilies.find(e->value);
    if (it == kFamilies.end())
      raw.fail(e->line, "[source] family: unknown family '" + e->value + "'");
    cfg.family = it->second;
  }
  cfg.n_max = static_cast<int>(raw.get_int("source", "n_max", cfg.n_max));
  cfg.tail_tol = raw.get_double("source", "tail_tol", cfg.tail_tol);
  const Entry* mean_e = raw.find("source", "mean");
  const Entry* alpha_e = raw.find("source", "alpha_sq");
  const Entry* m_e = raw.find("source", "m");
  const Entry* nth_e = raw.find("source", "n_th");
  switch (cfg.family) {
    case StateFamily::Coherent:
    case StateFamily::Thermal:
      if (!mean_e) raw.fail(1, "[source] mean is required for this family");
      cfg.mean = raw.get_double("source", "mean", cfg.mean);
      break;
    case StateFamily::Fock:
      if (!m_e) raw.fail(1, "[source] m is required for family fock");
      cfg.fock_m = static_cast<int>(raw.get_int("source", "m", cfg.fock_m));
      break;
    case StateFamily::OddCoherent: {
      if (!!mean_e == !!alpha_e)
        raw.fail(mean_e ? mean_e->line : 1,
                 "[source] odd_coherent needs exactly one of mean, alpha_sq");
      if (alpha_e) {
        cfg.alpha_sq = raw.get_double("source", "alpha_sq", 0.0);
      } else {
        cfg.mean = raw.get_double("source", "mean", cfg.mean);
        try {
          cfg.alpha_sq = solve_odd_coherent_alpha(cfg.mean);
        } catch (const std::invalid_argument& ex) {
          raw.fail(mean_e->line, std::string("[source] mean: ") + ex.what());
        }
      }
      break;
    }
    case StateFamily::Spats:
      if (!nth_e) raw.fail(1, "[source] n_th is required for family spats");
      cfg.n_th = raw.get_double("source", "n_th", cfg.n_th);
      break;
    case StateFamily::Custom:
      break;
  }

  // [network]
  if (const Entry* e = raw.find("network", "scheme")) {
    if (e->value == "uniform")
      cfg.scheme = MuxScheme::Uniform;
    else if (e->value == "ring")
      cfg.scheme = MuxScheme::Ring;
    else if (e->value == "custom")
      cfg.scheme = MuxScheme::Custom;
    else
      raw.fail(e->line, "[network] scheme: expected uniform, ring or custom");
  }
  cfg.n_modes = static_cast<int>(raw.get_int("network", "n_modes",
                                             cfg.n_modes));
  cfg.kappa = raw.get_double("network", "kappa", cfg.kappa);
  cfg.n_trc = static_cast<int>(raw.get_int("network", "n_trc", cfg.n_trc));
  cfg.weights = raw.get_list("network", "weights", cfg.weights);
  cfg.tail_loss = raw.get_double("network", "tail_loss", cfg.tail_loss);

  // [detector]
  cfg.eta = raw.get_list("detector", "eta", cfg.eta);
  cfg.nu = raw.get_list("detector", "nu", cfg.nu);

  // [engine]
  if (const Entry* e = raw.find("engine", "type")) {
    if (e->value == "exact")
      cfg.engine = EngineKind::Exact;
    else if (e->value == "mc")
      cfg.engine = EngineKind::MonteCarlo;
    else
      raw.fail(e->line, "[engine] type: expected exact or mc");
  }
  const std::int64_t trials = raw.get_int("engine", "trials",
                                          static_cast<std::int64_t>(cfg.trials));
  if (trials < 1) raw.fail(raw.find("engine", "trials")->line,
                           "[engine] trials must be >= 1");
  cfg.trials = static_cast<std::uint64_t>(trials);
  cfg.seed = static_cast<std::uint64_t>(
      raw.get_int("engine", "seed", static_cast<std::int64_t>(cfg.seed)));
  cfg.keep_raw = raw.get_bool("engine", "keep_raw", cfg.keep_raw);
  cfg.workers = static_cast<int>(raw.get_int("engine", "workers",
                                             cfg.workers));
  if (cfg.workers < 1) raw.fail(raw.find("engine", "workers")->line,
                                "[engine] workers must be >= 1");

  // Reject typos: every provided key must have been consumed.
  for (const auto& [sec, entries] : raw.sections)
    for (const auto& [key, entry] : entries)
      if (!entry.used)
        raw.fail(entry.line, "unknown key '" + key + "' in [" + sec + "]");

  // Validate by building everything once, mapping the throwing module back
  // to its section.
  try {
    const PhotonNumberDistribution pnd = build_source(cfg);
    const MultiplexConfig mux = build_network(cfg);
    const DetectorConfig det = build_detector(cfg, mux.n_modes());
    validate_pair(mux, det);
    if (cfg.engine == EngineKind::MonteCarlo && mux.n_modes() > 64)
      throw ConfigError(path + ": [network] Monte Carlo engine supports "
                        "at most 64 modes");
    (void)pnd;
  } catch (const ConfigError&) {
    throw;
  } catch (const TailToleranceError& ex) {
    throw ConfigError(path + ": [source] " + ex.what());
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(path + ": " + ex.what());
  }
  return cfg;
}

PhotonNumberDistribution build_source(const ExperimentConfig& cfg) {
  switch (cfg.family) {
    case StateFamily::Coherent:
      return coherent_pnd(cfg.mean, cfg.n_max, cfg.tail_tol);
    case StateFamily::Thermal:
      return thermal_pnd(cfg.mean, cfg.n_max, cfg.tail_tol);
    case StateFamily::Fock:
      return fock_pnd(cfg.fock_m, cfg.n_max);
    case StateFamily::OddCoherent:
      return odd_coherent_pnd(cfg.alpha_sq, cfg.n_max, cfg.tail_tol);
    case StateFamily::Spats:
      return spats_pnd(cfg.n_th, cfg.n_max, cfg.tail_tol);
    case StateFamily::Custom:
      break;
  }
  throw std::invalid_argument("custom sources cannot be built from a config");
}

MultiplexConfig build_network(const ExperimentConfig& cfg) {
  switch (cfg.scheme) {
    case MuxScheme::Uniform:
      return uniform_splitter(cfg.n_modes);
    case MuxScheme::Ring:
      return ring_resonator(cfg.kappa, cfg.n_trc);
    case MuxScheme::Custom:
      return custom_config(cfg.weights, cfg.tail_loss);
  }
  throw std::invalid_argument("unknown network scheme");
}

DetectorConfig build_detector(const ExperimentConfig& cfg, int n_modes) {
  std::vector<double> eta = cfg.eta;
  std::vector<double> nu = cfg.nu;
  if (eta.size() == 1) eta.assign(n_modes, eta[0]);
  if (nu.size() == 1) nu.assign(n_modes, nu[0]);
  return make_detector(std::move(eta), std::move(nu));
}

}  // namespace clicksim
