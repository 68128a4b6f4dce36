#include "robseq/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace robseq::config {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string strip_comment(const std::string& line) {
  bool in_quote = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_quote = !in_quote;
    if (line[i] == '#' && !in_quote) return line.substr(0, i);
  }
  return line;
}

double parse_number(const std::string& s, int lineno) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw ConfigError("line " + std::to_string(lineno) + ": bad number '" + s +
                      "'");
  }
  return v;
}

std::string parse_string_value(const std::string& s, int lineno) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"') {
    throw ConfigError("line " + std::to_string(lineno) +
                      ": expected quoted string, got '" + s + "'");
  }
  return s.substr(1, s.size() - 2);
}

std::vector<std::string> parse_array_items(const std::string& s, int lineno) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
    throw ConfigError("line " + std::to_string(lineno) +
                      ": expected [array], got '" + s + "'");
  }
  std::vector<std::string> items;
  std::stringstream ss(s.substr(1, s.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto t = trim(item);
    if (!t.empty()) items.push_back(t);
  }
  return items;
}

void apply_key(experiments::ExperimentConfig& cfg, const std::string& key,
               const std::string& value, int lineno) {
  using experiments::Method;
  if (key == "eps_algorithm") {
    cfg.eps_algorithm = parse_number(value, lineno);
  } else if (key == "eps_real") {
    cfg.eps_real = parse_number(value, lineno);
  } else if (key == "alpha") {
    cfg.alpha = parse_number(value, lineno);
  } else if (key == "horizon") {
    cfg.horizon = static_cast<std::uint64_t>(parse_number(value, lineno));
  } else if (key == "replications") {
    cfg.replications = static_cast<std::uint32_t>(parse_number(value, lineno));
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(parse_number(value, lineno));
  } else if (key == "mu0") {
    cfg.mu0 = parse_number(value, lineno);
  } else if (key == "mu1") {
    cfg.mu1 = parse_number(value, lineno);
  } else if (key == "null_a") {
    cfg.null_a = parse_number(value, lineno);
  } else if (key == "null_b") {
    cfg.null_b = parse_number(value, lineno);
  } else if (key == "eps_values") {
    cfg.eps_values.clear();
    for (const auto& item : parse_array_items(value, lineno)) {
      cfg.eps_values.push_back(parse_number(item, lineno));
    }
  } else if (key == "mu_values") {
    cfg.mu_values.clear();
    for (const auto& item : parse_array_items(value, lineno)) {
      cfg.mu_values.push_back(parse_number(item, lineno));
    }
  } else if (key == "methods") {
    cfg.methods.clear();
    for (const auto& item : parse_array_items(value, lineno)) {
      const auto name = parse_string_value(item, lineno);
      const auto m = experiments::method_from_name(name);
      if (!m) {
        throw ConfigError("line " + std::to_string(lineno) +
                          ": unknown method '" + name + "'");
      }
      cfg.methods.push_back(*m);
    }
  } else {
    throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" +
                      key + "'");
  }
}

}  // namespace

std::vector<experiments::ExperimentConfig> parse_string(
    const std::string& text) {
  std::vector<experiments::ExperimentConfig> configs;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  bool have_section = false;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(lineno) +
                          ": malformed section header");
      }
      const std::string name = trim(line.substr(1, line.size() - 2));
      const auto scenario = experiments::scenario_from_name(name);
      if (!scenario) {
        throw ConfigError("line " + std::to_string(lineno) +
                          ": unknown scenario '" + name + "'");
      }
      experiments::ExperimentConfig cfg;
      cfg.scenario = *scenario;
      configs.push_back(cfg);
      have_section = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key = value");
    }
    if (!have_section) {
      throw ConfigError("line " + std::to_string(lineno) +
                        ": key outside any [scenario] section");
    }
    apply_key(configs.back(), trim(line.substr(0, eq)),
              trim(line.substr(eq + 1)), lineno);
  }
  if (configs.empty()) {
    throw ConfigError("config: no [scenario] sections found");
  }
  return configs;
}

std::vector<experiments::ExperimentConfig> parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

}  // namespace robseq::config
