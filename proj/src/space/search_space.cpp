#include "hpo/space/search_space.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "hpo/core/errors.hpp"

namespace hpo {

std::string_view to_string(ParamKind kind) {
  switch (kind) {
    case ParamKind::real: return "real";
    case ParamKind::integer: return "integer";
    case ParamKind::categorical: return "categorical";
  }
  return "real";
}

std::string_view to_string(Trafo trafo) {
  switch (trafo) {
    case Trafo::none: return "none";
    case Trafo::exp: return "exp";
    case Trafo::exp_floor: return "exp_floor";
    case Trafo::pow2: return "pow2";
    case Trafo::pow10: return "pow10";
  }
  return "none";
}

std::optional<ParamKind> parse_param_kind(std::string_view s) {
  if (s == "real") return ParamKind::real;
  if (s == "integer") return ParamKind::integer;
  if (s == "categorical") return ParamKind::categorical;
  return std::nullopt;
}

std::optional<Trafo> parse_trafo(std::string_view s) {
  if (s == "none") return Trafo::none;
  if (s == "exp") return Trafo::exp;
  if (s == "exp_floor") return Trafo::exp_floor;
  if (s == "pow2") return Trafo::pow2;
  if (s == "pow10") return Trafo::pow10;
  return std::nullopt;
}

double apply_trafo(Trafo trafo, double x) {
  switch (trafo) {
    case Trafo::none: return x;
    case Trafo::exp: return std::exp(x);
    case Trafo::exp_floor: {
      const double v = std::exp(x);
      const double nearest = std::round(v);
      if (std::abs(v - nearest) <= 1e-9 * std::max(1.0, std::abs(v))) return nearest;
      return std::floor(v);
    }
    case Trafo::pow2: return std::exp2(x);
    case Trafo::pow10: return std::pow(10.0, x);
  }
  return x;
}

std::string format_value(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  std::ostringstream os;
  os.precision(17);
  os << std::get<double>(v);
  return os.str();
}

ParamSpec ParamSpec::real(std::string name, double lower, double upper, Trafo trafo) {
  ParamSpec p;
  p.name = std::move(name);
  p.kind = ParamKind::real;
  p.lower = lower;
  p.upper = upper;
  p.trafo = trafo;
  return p;
}

ParamSpec ParamSpec::integer(std::string name, double lower, double upper, Trafo trafo) {
  ParamSpec p = real(std::move(name), lower, upper, trafo);
  p.kind = ParamKind::integer;
  return p;
}

ParamSpec ParamSpec::categorical(std::string name, std::vector<std::string> levels) {
  ParamSpec p;
  p.name = std::move(name);
  p.kind = ParamKind::categorical;
  p.lower = 0.0;
  p.upper = 0.0;
  p.levels = std::move(levels);
  return p;
}

ParamSpec& ParamSpec::when(std::string parent, std::vector<std::string> values) {
  condition = Condition{std::move(parent), std::move(values)};
  return *this;
}

long long ParamSpec::int_lower() const { return static_cast<long long>(std::ceil(lower)); }
long long ParamSpec::int_upper() const { return static_cast<long long>(std::floor(upper)); }

std::optional<std::size_t> ParamSpec::level_index(std::string_view level) const {
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (levels[i] == level) return i;
  return std::nullopt;
}

Value ParamSpec::transform(const Value& v) const {
  if (kind == ParamKind::categorical) return v;
  return apply_trafo(trafo, std::get<double>(v));
}

const Value& Config::at(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end()) throw InvalidArgument("config has no value for '" + name + "'");
  return it->second;
}

double Config::number(const std::string& name) const {
  const auto& v = at(name);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  throw InvalidArgument("'" + name + "' is not numeric");
}

const std::string& Config::level(const std::string& name) const {
  const auto& v = at(name);
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  throw InvalidArgument("'" + name + "' is not categorical");
}

std::string Config::str() const {
  std::string out;
  for (const auto& [k, v] : values_) {
    if (!out.empty()) out += ", ";
    out += k + "=" + format_value(v);
  }
  return out;
}

double TransformedConfig::number(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end() || !std::holds_alternative<double>(it->second))
    throw InvalidArgument("missing numeric hyperparameter '" + name + "'");
  return std::get<double>(it->second);
}

double TransformedConfig::number_or(const std::string& name, double fallback) const {
  auto it = values_.find(name);
  if (it == values_.end()) return fallback;
  return std::get<double>(it->second);
}

const std::string& TransformedConfig::level(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end() || !std::holds_alternative<std::string>(it->second))
    throw InvalidArgument("missing categorical hyperparameter '" + name + "'");
  return std::get<std::string>(it->second);
}

std::string TransformedConfig::level_or(const std::string& name, const std::string& fallback) const {
  auto it = values_.find(name);
  if (it == values_.end()) return fallback;
  return std::get<std::string>(it->second);
}

SearchSpace::SearchSpace(std::vector<ParamSpec> specs) : specs_(std::move(specs)) {
  std::set<std::string> names;
  for (const auto& s : specs_) {
    if (s.name.empty()) throw InvalidArgument("parameter with empty name");
    if (!names.insert(s.name).second) throw InvalidArgument("duplicate parameter name '" + s.name + "'");
    if (s.kind == ParamKind::categorical) {
      std::set<std::string> distinct(s.levels.begin(), s.levels.end());
      if (s.levels.size() < 2 || distinct.size() != s.levels.size())
        throw InvalidArgument("categorical '" + s.name + "' needs >= 2 distinct levels");
    } else {
      if (!std::isfinite(s.lower) || !std::isfinite(s.upper) || !(s.lower < s.upper))
        throw InvalidArgument("'" + s.name + "' needs finite lower < upper");
      if (s.kind == ParamKind::integer && s.int_lower() > s.int_upper())
        throw InvalidArgument("integer '" + s.name + "' has no integer in its bounds");
    }
  }
  for (const auto& s : specs_) {
    if (!s.condition) continue;
    const ParamSpec* parent = find(s.condition->parent);
    if (!parent) throw InvalidArgument("'" + s.name + "' conditioned on unknown '" + s.condition->parent + "'");
    if (parent->kind != ParamKind::categorical)
      throw InvalidArgument("'" + s.name + "' conditioned on non-categorical '" + parent->name + "'");
    if (s.condition->values.empty()) throw InvalidArgument("'" + s.name + "' has an empty condition");
    for (const auto& v : s.condition->values)
      if (!parent->level_index(v))
        throw InvalidArgument("condition of '" + s.name + "' uses unknown level '" + v + "'");
  }
  // Kahn's algorithm over the parent -> child forest, declaration order for ties.
  const std::size_t n = specs_.size();
  std::vector<bool> placed(n, false);
  order_.reserve(n);
  while (order_.size() < n) {
    bool progress = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (placed[i]) continue;
      const auto& c = specs_[i].condition;
      if (c && !placed[*index_of(c->parent)]) continue;
      placed[i] = true;
      order_.push_back(i);
      progress = true;
    }
    if (!progress) throw InvalidArgument("condition graph contains a cycle");
  }
}

const ParamSpec* SearchSpace::find(std::string_view name) const {
  for (const auto& s : specs_)
    if (s.name == name) return &s;
  return nullptr;
}

const ParamSpec& SearchSpace::spec(std::string_view name) const {
  if (const auto* s = find(name)) return *s;
  throw InvalidArgument("unknown parameter '" + std::string(name) + "'");
}

std::optional<std::size_t> SearchSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < specs_.size(); ++i)
    if (specs_[i].name == name) return i;
  return std::nullopt;
}

bool SearchSpace::is_active(const ParamSpec& spec, const Config& cfg) const {
  const ParamSpec* cur = &spec;
  while (cur->condition) {
    const auto& c = *cur->condition;
    if (!cfg.has(c.parent)) return false;
    const auto* lvl = std::get_if<std::string>(&cfg.at(c.parent));
    if (!lvl || std::find(c.values.begin(), c.values.end(), *lvl) == c.values.end()) return false;
    cur = &this->spec(c.parent);
  }
  return true;
}

TransformedConfig SearchSpace::transform(const Config& cfg) const {
  Config::Map out;
  for (const auto& [name, v] : cfg.values()) {
    const ParamSpec* s = find(name);
    out[name] = s ? s->transform(v) : v;
  }
  return TransformedConfig(std::move(out));
}

SearchSpace SearchSpace::prefixed(const std::string& prefix) const {
  std::vector<ParamSpec> out = specs_;
  for (auto& s : out) {
    s.name = prefix + s.name;
    if (s.condition) s.condition->parent = prefix + s.condition->parent;
  }
  return SearchSpace(std::move(out));
}

Config SearchSpace::slice(const Config& cfg, const std::string& prefix) const {
  Config out;
  for (const auto& [name, v] : cfg.values())
    if (name.rfind(prefix, 0) == 0) out.set(name.substr(prefix.size()), v);
  return out;
}

SearchSpace concat(const std::vector<SearchSpace>& parts) {
  std::vector<ParamSpec> all;
  for (const auto& p : parts) all.insert(all.end(), p.specs().begin(), p.specs().end());
  return SearchSpace(std::move(all));
}

namespace {

bool numeric_in_bounds(const ParamSpec& s, double x) {
  if (!std::isfinite(x) || x < s.lower || x > s.upper) return false;
  if (s.kind == ParamKind::integer && x != std::round(x)) return false;
  return true;
}

}  // namespace

std::vector<Violation> validate(const SearchSpace& space, const Config& cfg) {
  std::vector<Violation> out;
  for (const auto& [name, v] : cfg.values())
    if (!space.find(name))
      out.push_back({Violation::Kind::unknown_name, name, name + " unknown"});
  for (const auto& s : space.specs()) {
    const bool active = space.is_active(s, cfg);
    const bool present = cfg.has(s.name);
    if (active && !present) {
      out.push_back({Violation::Kind::missing_active, s.name, s.name + " required"});
      continue;
    }
    if (!active && present) {
      out.push_back({Violation::Kind::extra_inactive, s.name, s.name + " inactive"});
      continue;
    }
    if (!present) continue;
    const auto& v = cfg.at(s.name);
    if (s.kind == ParamKind::categorical) {
      const auto* lvl = std::get_if<std::string>(&v);
      if (!lvl)
        out.push_back({Violation::Kind::wrong_type, s.name, s.name + " must be a level"});
      else if (!s.level_index(*lvl))
        out.push_back({Violation::Kind::out_of_bounds, s.name, s.name + " has unknown level " + *lvl});
    } else {
      const auto* x = std::get_if<double>(&v);
      if (!x)
        out.push_back({Violation::Kind::wrong_type, s.name, s.name + " must be numeric"});
      else if (!numeric_in_bounds(s, *x))
        out.push_back({Violation::Kind::out_of_bounds, s.name, s.name + " out of bounds"});
    }
  }
  return out;
}

Value sample_param(const ParamSpec& spec, Rng& rng) {
  switch (spec.kind) {
    case ParamKind::real:
      return std::uniform_real_distribution<double>(spec.lower, spec.upper)(rng);
    case ParamKind::integer:
      return static_cast<double>(std::uniform_int_distribution<long long>(spec.int_lower(), spec.int_upper())(rng));
    case ParamKind::categorical:
      return spec.levels[std::uniform_int_distribution<std::size_t>(0, spec.levels.size() - 1)(rng)];
  }
  return 0.0;
}

Config sample_uniform(const SearchSpace& space, Rng& rng) {
  Config cfg;
  for (std::size_t i : space.topological_order()) {
    const auto& s = space.specs()[i];
    if (space.is_active(s, cfg)) cfg.set(s.name, sample_param(s, rng));
  }
  return cfg;
}

std::vector<Config> grid(const SearchSpace& space, std::size_t resolution) {
  if (resolution == 0) throw InvalidArgument("grid resolution must be positive");
  std::vector<std::vector<Value>> axes;
  for (const auto& s : space.specs()) {
    std::vector<Value> axis;
    if (s.kind == ParamKind::categorical) {
      axis.assign(s.levels.begin(), s.levels.end());
    } else if (s.kind == ParamKind::real) {
      if (resolution < 2) throw InvalidArgument("real parameter '" + s.name + "' needs grid resolution >= 2");
      for (std::size_t i = 0; i < resolution; ++i) {
        const double x = i + 1 == resolution ? s.upper
                                             : s.lower + s.range() * static_cast<double>(i) / static_cast<double>(resolution - 1);
        axis.emplace_back(x);
      }
    } else {
      std::vector<double> pts;
      const double lo = static_cast<double>(s.int_lower());
      const double hi = static_cast<double>(s.int_upper());
      for (std::size_t i = 0; i < resolution; ++i) {
        const double t = resolution == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(resolution - 1);
        const double x = std::clamp(std::round(s.lower + s.range() * t), lo, hi);
        if (std::find(pts.begin(), pts.end(), x) == pts.end()) pts.push_back(x);
      }
      axis.assign(pts.begin(), pts.end());
    }
    axes.push_back(std::move(axis));
  }

  std::vector<Config> out;
  std::set<Config> seen;
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    Config full;
    for (std::size_t d = 0; d < axes.size(); ++d) full.set(space.specs()[d].name, axes[d][idx[d]]);
    Config c = canonicalize(space, full);
    if (seen.insert(c).second) out.push_back(std::move(c));
    // Odometer with the last spec varying fastest.
    std::size_t d = axes.size();
    while (d > 0) {
      --d;
      if (++idx[d] < axes[d].size()) break;
      idx[d] = 0;
      if (d == 0) return out;
    }
    if (axes.empty()) return out;
  }
}

Config canonicalize(const SearchSpace& space, const Config& cfg) {
  Config out;
  for (std::size_t i : space.topological_order()) {
    const auto& s = space.specs()[i];
    if (cfg.has(s.name) && space.is_active(s, out)) out.set(s.name, cfg.at(s.name));
  }
  return out;
}

Config repair(const SearchSpace& space, const Config& cfg, Rng& rng) {
  Config out;
  for (std::size_t i : space.topological_order()) {
    const auto& s = space.specs()[i];
    if (!space.is_active(s, out)) continue;
    out.set(s.name, cfg.has(s.name) ? cfg.at(s.name) : sample_param(s, rng));
  }
  return out;
}

std::size_t encoded_dim(const SearchSpace& space) {
  std::size_t n = 0;
  for (const auto& s : space.specs()) {
    n += s.kind == ParamKind::categorical ? s.levels.size() : 1;
    if (s.condition) ++n;
  }
  return n;
}

std::vector<double> encode_numeric(const SearchSpace& space, const Config& cfg) {
  if (auto v = validate(space, cfg); !v.empty()) throw InvalidArgument("cannot encode invalid config: " + v.front().message);
  std::vector<double> out;
  out.reserve(encoded_dim(space));
  for (const auto& s : space.specs()) {
    const bool present = cfg.has(s.name);
    if (s.kind == ParamKind::categorical) {
      const std::size_t hot = present ? *s.level_index(cfg.level(s.name)) : 0;
      for (std::size_t k = 0; k < s.levels.size(); ++k) out.push_back(k == hot ? 1.0 : 0.0);
    } else {
      out.push_back(present ? (cfg.number(s.name) - s.lower) / s.range() : 0.5);
    }
    if (s.condition) out.push_back(present ? 1.0 : 0.0);
  }
  return out;
}

void check_compatible(const SearchSpace& expected, const SearchSpace& actual) {
  if (expected.dim() != actual.dim())
    throw IncompatibleSpace("spaces differ in dimension (" + std::to_string(expected.dim()) + " vs " +
                            std::to_string(actual.dim()) + ")");
  for (const auto& e : expected.specs()) {
    const ParamSpec* a = actual.find(e.name);
    if (!a) throw IncompatibleSpace("parameter '" + e.name + "' missing");
    if (a->kind != e.kind) throw IncompatibleSpace("parameter '" + e.name + "' differs in kind");
    if (a->lower != e.lower || a->upper != e.upper) throw IncompatibleSpace("parameter '" + e.name + "' differs in bounds");
    if (a->levels != e.levels) throw IncompatibleSpace("parameter '" + e.name + "' differs in levels");
    if (a->trafo != e.trafo || a->condition != e.condition)
      throw IncompatibleSpace("parameter '" + e.name + "' differs in trafo or condition");
  }
}

}  // namespace hpo
