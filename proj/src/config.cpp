#include "kpt/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "kpt/rng.hpp"

namespace kpt {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last)
    throw ConfigError("bad value for '" + key + "': " + value);
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    double out = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("bad value for '" + key + "': " + value);
  }
}

}  // namespace

void apply_assignment(ExperimentConfig& cfg, const std::string& assignment) {
  size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("expected key=value, got: " + assignment);
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.empty()) throw ConfigError("empty key in: " + assignment);

  if (key == "pair") {
    if (value != "perm" && value != "easy" && value != "overlap")
      throw ConfigError("pair must be perm, easy or overlap, got: " + value);
    cfg.pair = value;
  } else if (key == "n") {
    cfg.n = parse_number<int>(key, value);
  } else if (key == "perm_seed") {
    cfg.perm_seed = parse_number<uint64_t>(key, value);
  } else if (key == "hard_bit") {
    cfg.hard_bit = parse_number<int>(key, value);
  } else if (key == "m") {
    cfg.m = parse_number<int>(key, value);
  } else if (key == "k") {
    cfg.k = parse_number<int>(key, value);
  } else if (key == "games") {
    cfg.games = parse_number<long>(key, value);
  } else if (key == "student") {
    cfg.student = value;
  } else if (key == "probe") {
    cfg.probe = parse_number<int>(key, value);
  } else if (key == "constant_index") {
    cfg.constant_index = parse_number<int>(key, value);
  } else if (key == "estimation_samples") {
    cfg.estimation_samples = parse_number<long>(key, value);
  } else if (key == "advice_candidates") {
    cfg.advice_candidates = parse_number<int>(key, value);
  } else if (key == "advantage_samples") {
    cfg.advantage_samples = parse_number<long>(key, value);
  } else if (key == "tau") {
    cfg.tau = parse_double(key, value);
  } else if (key == "confidence") {
    cfg.confidence = parse_double(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_number<uint64_t>(key, value);
  } else if (key == "workers") {
    cfg.workers = parse_number<int>(key, value);
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (size_t hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      apply_assignment(cfg, line);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::optional<std::string>& path,
                             const std::vector<std::string>& overrides) {
  ExperimentConfig cfg;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("cannot open config file: " + *path);
    std::stringstream buf;
    buf << in.rdbuf();
    cfg = parse_config_text(buf.str());
  }
  for (const auto& o : overrides) apply_assignment(cfg, o);
  return cfg;
}

nlohmann::ordered_json config_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["pair"] = cfg.pair;
  j["n"] = cfg.n;
  j["perm_seed"] = cfg.perm_seed;
  j["hard_bit"] = cfg.hard_bit;
  j["m"] = cfg.m;
  j["k"] = cfg.k;
  j["games"] = cfg.games;
  j["student"] = cfg.student;
  j["probe"] = cfg.probe;
  j["constant_index"] = cfg.constant_index;
  j["estimation_samples"] = cfg.estimation_samples;
  j["advice_candidates"] = cfg.advice_candidates;
  j["advantage_samples"] = cfg.advantage_samples;
  j["tau"] = cfg.tau;
  j["confidence"] = cfg.confidence;
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  return j;
}

uint64_t config_hash(const ExperimentConfig& cfg) {
  return fnv1a(config_json(cfg).dump());
}

}  // namespace kpt
