#include "core/mapspec.hpp"

#include <json.hpp>

#include <cstdlib>
#include <map>
#include <optional>
#include <set>

#include "core/builtins.hpp"
#include "core/errors.hpp"

namespace hodo {

namespace {

using nlohmann::json;
using Params = std::map<std::string, std::string>;

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.contains(it.key()))
      fail(errc::config, "unknown key '" + it.key() + "' in " + where);
}

std::optional<Box> parse_box(const json& j, std::size_t dim) {
  if (!j.contains("box")) return std::nullopt;
  const json& b = j.at("box");
  if (!b.is_array() || b.size() != dim)
    fail(errc::config, "box must list one [lo, hi] pair per dimension");
  Box box;
  for (const auto& pair : b) {
    if (!pair.is_array() || pair.size() != 2)
      fail(errc::config, "box entries must be [lo, hi] pairs");
    double lo = pair.at(0).get<double>(), hi = pair.at(1).get<double>();
    if (!(lo < hi)) fail(errc::config, "box entries need lo < hi");
    box.lo.push_back(lo);
    box.hi.push_back(hi);
  }
  return box;
}

double param_number(const Params& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) fail(errc::config, "missing parameter '" + key + "'");
  const char* s = it->second.c_str();
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s || *end != '\0')
    fail(errc::config, "parameter '" + key + "' is not a number: '" + it->second + "'");
  return v;
}

std::string param_string(const Params& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) fail(errc::config, "missing parameter '" + key + "'");
  return it->second;
}

void reject_extra_params(const Params& p, const std::set<std::string>& known,
                         const std::string& builtin) {
  for (const auto& [k, v] : p)
    if (!known.contains(k))
      fail(errc::config, "unknown parameter '" + k + "' for builtin '" + builtin + "'");
}

std::unique_ptr<InitialMap> make_builtin(const std::string& name,
                                         const Params& params,
                                         std::optional<std::size_t> dim,
                                         std::optional<Box> box) {
  if (name == "linear") {
    reject_extra_params(params, {"beta"}, name);
    return std::make_unique<LinearMap>(param_number(params, "beta"),
                                       dim.value_or(2), box);
  }
  if (name == "rotational") {
    reject_extra_params(params, {"alpha"}, name);
    return std::make_unique<RotationalMap>(param_number(params, "alpha"), box);
  }
  if (name == "harmonic") {
    reject_extra_params(params, {"W"}, name);
    return std::make_unique<HarmonicMap>(param_string(params, "W"), box);
  }
  if (name == "cubic") {
    reject_extra_params(params, {}, name);
    return std::make_unique<CubicMap>(box);
  }
  if (name == "gaussian") {
    reject_extra_params(params, {}, name);
    return std::make_unique<GaussianMap>();
  }
  if (name == "analytic2d") {
    reject_extra_params(params, {"F"}, name);
    return std::make_unique<Analytic2DMap>(param_string(params, "F"), box);
  }
  fail(errc::config, "unknown builtin map '" + name + "'");
}

}  // namespace

std::unique_ptr<InitialMap> map_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(errc::parse, std::string("map JSON: ") + e.what());
  }
  if (!j.is_object()) fail(errc::config, "map JSON must be an object");
  reject_unknown_keys(j, {"dim", "builtin", "params", "expr", "box"}, "map JSON");
  std::optional<std::size_t> dim;
  if (j.contains("dim")) dim = j.at("dim").get<std::size_t>();
  if (j.contains("builtin") == j.contains("expr"))
    fail(errc::config, "map JSON needs exactly one of 'builtin' or 'expr'");
  if (j.contains("builtin")) {
    Params params;
    if (j.contains("params")) {
      const json& p = j.at("params");
      if (!p.is_object()) fail(errc::config, "'params' must be an object");
      for (auto it = p.begin(); it != p.end(); ++it) {
        if (it.value().is_string())
          params[it.key()] = it.value().get<std::string>();
        else
          params[it.key()] = it.value().dump();
      }
    }
    auto box = parse_box(j, dim.value_or(2));
    auto m = make_builtin(j.at("builtin").get<std::string>(), params, dim, box);
    if (dim && m->dim() != *dim)
      fail(errc::config, "declared dim does not match builtin dimension");
    return m;
  }
  const json& e = j.at("expr");
  if (!e.is_array() || e.size() < 2)
    fail(errc::config, "'expr' must be an array of component expressions");
  std::vector<std::string> comps;
  for (const auto& c : e) comps.push_back(c.get<std::string>());
  if (dim && *dim != comps.size())
    fail(errc::config, "declared dim does not match number of components");
  auto box = parse_box(j, comps.size());
  return std::make_unique<ExprMap>(comps, box);
}

std::unique_ptr<InitialMap> map_from_spec(const std::string& spec) {
  std::string name = spec;
  Params params;
  auto colon = spec.find(':');
  if (colon != std::string::npos) {
    name = spec.substr(0, colon);
    std::string rest = spec.substr(colon + 1);
    // key=value pairs separated by commas; values may themselves contain
    // commas only inside parentheses (expression parameters).
    std::size_t start = 0;
    int depth = 0;
    for (std::size_t i = 0; i <= rest.size(); ++i) {
      if (i < rest.size() && rest[i] == '(') ++depth;
      if (i < rest.size() && rest[i] == ')') --depth;
      if (i == rest.size() || (rest[i] == ',' && depth == 0)) {
        std::string kv = rest.substr(start, i - start);
        start = i + 1;
        if (kv.empty()) continue;
        auto eq = kv.find('=');
        if (eq == std::string::npos)
          fail(errc::config, "map parameter '" + kv + "' is not key=value");
        params[kv.substr(0, eq)] = kv.substr(eq + 1);
      }
    }
  }
  if (name == "expr") {
    std::vector<std::string> comps;
    for (std::size_t i = 1;; ++i) {
      auto it = params.find("f" + std::to_string(i));
      if (it == params.end()) break;
      comps.push_back(it->second);
    }
    if (comps.size() < 2 || comps.size() != params.size())
      fail(errc::config,
           "expr maps need consecutive components f1=...,f2=...[,f3=...]");
    return std::make_unique<ExprMap>(comps, std::nullopt);
  }
  return make_builtin(name, params, std::nullopt, std::nullopt);
}

}  // namespace hodo
