#include "hpo/space/space_io.hpp"

#include "hpo/core/errors.hpp"

namespace hpo {

using nlohmann::json;

json space_to_json(const SearchSpace& space) {
  json params = json::array();
  for (const auto& s : space.specs()) {
    json p;
    p["name"] = s.name;
    p["type"] = std::string(to_string(s.kind));
    if (s.kind == ParamKind::categorical) {
      p["levels"] = s.levels;
    } else {
      p["lower"] = s.lower;
      p["upper"] = s.upper;
    }
    p["trafo"] = std::string(to_string(s.trafo));
    if (s.condition) p["condition"] = {{"parent", s.condition->parent}, {"values", s.condition->values}};
    params.push_back(std::move(p));
  }
  return json{{"params", std::move(params)}};
}

SearchSpace space_from_json(const json& doc, const std::string& where) {
  if (!doc.is_object() || !doc.contains("params") || !doc["params"].is_array())
    throw ConfigError(where + "/params", "expected an array of parameter objects");
  std::vector<ParamSpec> specs;
  const auto& params = doc["params"];
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::string at = where + "/params/" + std::to_string(i);
    const auto& p = params[i];
    if (!p.is_object()) throw ConfigError(at, "expected an object");
    if (!p.contains("name") || !p["name"].is_string()) throw ConfigError(at + "/name", "missing string");
    if (!p.contains("type") || !p["type"].is_string()) throw ConfigError(at + "/type", "missing string");
    auto kind = parse_param_kind(p["type"].get<std::string>());
    if (!kind) throw ConfigError(at + "/type", "must be real, integer or categorical");
    ParamSpec s;
    s.name = p["name"].get<std::string>();
    s.kind = *kind;
    if (*kind == ParamKind::categorical) {
      s.lower = s.upper = 0.0;
      if (!p.contains("levels") || !p["levels"].is_array()) throw ConfigError(at + "/levels", "missing array");
      for (const auto& l : p["levels"]) {
        if (!l.is_string()) throw ConfigError(at + "/levels", "levels must be strings");
        s.levels.push_back(l.get<std::string>());
      }
    } else {
      for (const char* key : {"lower", "upper"})
        if (!p.contains(key) || !p[key].is_number()) throw ConfigError(at + "/" + key, "missing number");
      s.lower = p["lower"].get<double>();
      s.upper = p["upper"].get<double>();
    }
    if (p.contains("trafo")) {
      auto t = p["trafo"].is_string() ? parse_trafo(p["trafo"].get<std::string>()) : std::nullopt;
      if (!t) throw ConfigError(at + "/trafo", "must be one of none, exp, exp_floor, pow2, pow10");
      s.trafo = *t;
    }
    if (p.contains("condition")) {
      const auto& c = p["condition"];
      if (!c.is_object() || !c.contains("parent") || !c["parent"].is_string() || !c.contains("values") ||
          !c["values"].is_array())
        throw ConfigError(at + "/condition", "expected {parent, values}");
      Condition cond{c["parent"].get<std::string>(), {}};
      for (const auto& v : c["values"]) cond.values.push_back(v.get<std::string>());
      s.condition = std::move(cond);
    }
    specs.push_back(std::move(s));
  }
  try {
    return SearchSpace(std::move(specs));
  } catch (const InvalidArgument& e) {
    throw ConfigError(where + "/params", e.what());
  }
}

json config_to_json(const Config& cfg) {
  json out = json::object();
  for (const auto& [k, v] : cfg.values()) {
    if (const auto* d = std::get_if<double>(&v))
      out[k] = *d;
    else
      out[k] = std::get<std::string>(v);
  }
  return out;
}

Config config_from_json(const json& doc) {
  Config cfg;
  for (const auto& [k, v] : doc.items()) {
    if (v.is_number())
      cfg.set(k, v.get<double>());
    else if (v.is_string())
      cfg.set(k, v.get<std::string>());
    else
      throw ConfigError("/" + k, "config values must be numbers or strings");
  }
  return cfg;
}

}  // namespace hpo
