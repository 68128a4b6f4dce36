#include "robseq/modelspec.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace robseq::spec {
namespace {

// "key=val,key=val" -> map; every key must be consumed by the caller
std::map<std::string, std::string> parse_kv(const std::string& text,
                                            const std::string& what) {
  std::map<std::string, std::string> kv;
  if (text.empty()) return kv;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw SpecError(what + ": expected key=value, got '" + item + "'");
    }
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return kv;
}

double to_double(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw SpecError(what + ": bad number '" + s + "'");
  }
  return v;
}

double take(std::map<std::string, std::string>& kv, const std::string& key,
            const std::string& what) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw SpecError(what + ": missing " + key);
  const double v = to_double(it->second, what);
  kv.erase(it);
  return v;
}

double take_or(std::map<std::string, std::string>& kv, const std::string& key,
               double fallback, const std::string& what) {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  const double v = to_double(it->second, what);
  kv.erase(it);
  return v;
}

void expect_empty(const std::map<std::string, std::string>& kv,
                  const std::string& what) {
  if (!kv.empty()) {
    throw SpecError(what + ": unknown key '" + kv.begin()->first + "'");
  }
}

std::pair<std::string, std::string> split_head(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return {text, ""};
  return {text.substr(0, colon), text.substr(colon + 1)};
}

ModelPtr parse_component(const std::string& text);

// mixture body: W*TYPE(ARGS)+W*TYPE(ARGS)+...
ModelPtr parse_mixture(const std::string& body) {
  std::vector<std::pair<double, ModelPtr>> comps;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const auto star = body.find('*', pos);
    if (star == std::string::npos) {
      throw SpecError("mixture: expected WEIGHT*COMPONENT in '" + body + "'");
    }
    const double w = to_double(body.substr(pos, star - pos), "mixture weight");
    const auto open = body.find('(', star);
    if (open == std::string::npos) {
      throw SpecError("mixture: component needs (args)");
    }
    const auto close = body.find(')', open);
    if (close == std::string::npos) throw SpecError("mixture: missing ')'");
    const std::string type = body.substr(star + 1, open - star - 1);
    const std::string args = body.substr(open + 1, close - open - 1);
    comps.emplace_back(w, parse_component(type + ":" + args));
    pos = close + 1;
    if (pos < body.size()) {
      if (body[pos] != '+') throw SpecError("mixture: expected '+'");
      ++pos;
    }
  }
  if (comps.empty()) throw SpecError("mixture: no components");
  return std::make_shared<MixtureModel>(std::move(comps));
}

ModelPtr parse_component(const std::string& text) {
  const auto [head, body] = split_head(text);
  if (head == "gaussian") {
    auto kv = parse_kv(body, "gaussian");
    const double mu = take(kv, "mu", "gaussian");
    const double sigma = take_or(kv, "sigma", 1.0, "gaussian");
    expect_empty(kv, "gaussian");
    return std::make_shared<GaussianModel>(mu, sigma);
  }
  if (head == "cauchy") {
    auto kv = parse_kv(body, "cauchy");
    const double loc = take(kv, "loc", "cauchy");
    const double scale = take(kv, "scale", "cauchy");
    expect_empty(kv, "cauchy");
    return std::make_shared<CauchyModel>(loc, scale);
  }
  if (head == "discrete") {
    auto kv = parse_kv(body, "discrete");
    const auto it = kv.find("file");
    if (it == kv.end()) throw SpecError("discrete: missing file=");
    const std::string path = it->second;
    kv.erase(it);
    expect_empty(kv, "discrete");
    return std::make_shared<DiscreteModel>(parse_discrete_file(path));
  }
  if (head == "mixture") {
    return parse_mixture(body);
  }
  throw SpecError("unknown model type '" + head + "'");
}

}  // namespace

ModelPtr parse_model(const std::string& text) { return parse_component(text); }

DiscreteDist parse_discrete_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("discrete: cannot open '" + path + "'");
  std::vector<double> support, probs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double x, p;
    if (!(ls >> x >> p)) {
      throw SpecError("discrete: bad line " + std::to_string(lineno) + " in " +
                      path);
    }
    support.push_back(x);
    probs.push_back(p);
  }
  try {
    return DiscreteDist(std::move(support), std::move(probs));
  } catch (const std::invalid_argument& e) {
    throw SpecError(std::string("discrete: ") + e.what());
  }
}

bool is_interval_null(const std::string& text) {
  return split_head(text).first == "gaussian-interval";
}

IntervalNull parse_interval_null(const std::string& text) {
  const auto [head, body] = split_head(text);
  if (head != "gaussian-interval") {
    throw SpecError("expected gaussian-interval:a=..,b=.., got '" + text + "'");
  }
  auto kv = parse_kv(body, "gaussian-interval");
  IntervalNull null;
  null.a = take(kv, "a", "gaussian-interval");
  null.b = take(kv, "b", "gaussian-interval");
  expect_empty(kv, "gaussian-interval");
  if (!(null.a <= null.b)) throw SpecError("gaussian-interval: needs a <= b");
  return null;
}

AlternativeClass parse_alt_class(const std::string& text) {
  const auto [head, body] = split_head(text);
  if (head == "gaussian-neq") {
    auto kv = parse_kv(body, "gaussian-neq");
    const double mu = take(kv, "mu", "gaussian-neq");
    expect_empty(kv, "gaussian-neq");
    return AlternativeClass::not_equal(mu);
  }
  if (head == "gaussian-outside") {
    auto kv = parse_kv(body, "gaussian-outside");
    const double a = take(kv, "a", "gaussian-outside");
    const double b = take(kv, "b", "gaussian-outside");
    expect_empty(kv, "gaussian-outside");
    if (!(a <= b)) throw SpecError("gaussian-outside: needs a <= b");
    return AlternativeClass::outside_interval(a, b);
  }
  throw SpecError("unknown alternative class '" + head + "'");
}

}  // namespace robseq::spec
