#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hpo/core/rng.hpp"

namespace hpo {

enum class ParamKind { real, integer, categorical };

/// Monotone map applied when a tuner-scale value is handed to a learner.
enum class Trafo { none, exp, exp_floor, pow2, pow10 };

std::string_view to_string(ParamKind kind);
std::string_view to_string(Trafo trafo);
std::optional<ParamKind> parse_param_kind(std::string_view s);
std::optional<Trafo> parse_trafo(std::string_view s);

double apply_trafo(Trafo trafo, double x);

/// Numeric values (real and integer, tuner scale) are doubles; categorical values are level names.
using Value = std::variant<double, std::string>;

std::string format_value(const Value& v);

/// Single-parent activation condition: active iff parent is active and takes one of `values`.
struct Condition {
  std::string parent;
  std::vector<std::string> values;

  bool operator==(const Condition&) const = default;
};

struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::real;
  double lower = 0.0;
  double upper = 1.0;
  std::vector<std::string> levels;
  Trafo trafo = Trafo::none;
  std::optional<Condition> condition;

  static ParamSpec real(std::string name, double lower, double upper, Trafo trafo = Trafo::none);
  static ParamSpec integer(std::string name, double lower, double upper, Trafo trafo = Trafo::none);
  static ParamSpec categorical(std::string name, std::vector<std::string> levels);

  /// Attach an activation condition; returns *this for chaining.
  ParamSpec& when(std::string parent, std::vector<std::string> values);

  bool is_numeric() const { return kind != ParamKind::categorical; }
  double range() const { return upper - lower; }
  /// Integer grid bounds: ceil(lower), floor(upper).
  long long int_lower() const;
  long long int_upper() const;
  std::optional<std::size_t> level_index(std::string_view level) const;
  /// Tuner-scale value to learner-scale value.
  Value transform(const Value& v) const;

  bool operator==(const ParamSpec&) const = default;
};

/// Concrete configuration: values for the active parameters only.
class Config {
 public:
  using Map = std::map<std::string, Value>;

  Config() = default;
  explicit Config(Map values) : values_(std::move(values)) {}

  void set(const std::string& name, Value v) { values_[name] = std::move(v); }
  void erase(const std::string& name) { values_.erase(name); }
  bool has(const std::string& name) const { return values_.count(name) != 0; }
  const Value& at(const std::string& name) const;
  double number(const std::string& name) const;
  const std::string& level(const std::string& name) const;

  const Map& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  /// Human-readable `name=value` list in name order.
  std::string str() const;

  bool operator==(const Config&) const = default;
  auto operator<=>(const Config& o) const { return values_ <=> o.values_; }

 private:
  Map values_;
};

/// Learner-scale view of a configuration (numeric values transformed).
class TransformedConfig {
 public:
  explicit TransformedConfig(Config::Map values) : values_(std::move(values)) {}

  bool has(const std::string& name) const { return values_.count(name) != 0; }
  double number(const std::string& name) const;
  double number_or(const std::string& name, double fallback) const;
  const std::string& level(const std::string& name) const;
  std::string level_or(const std::string& name, const std::string& fallback) const;
  const Config::Map& values() const { return values_; }

 private:
  Config::Map values_;
};

/// Ordered list of parameter specs with a tree of single-parent conditions.
/// Immutable after construction; construction validates every invariant.
class SearchSpace {
 public:
  SearchSpace() = default;
  explicit SearchSpace(std::vector<ParamSpec> specs);

  const std::vector<ParamSpec>& specs() const { return specs_; }
  std::size_t dim() const { return specs_.size(); }
  bool empty() const { return specs_.empty(); }
  const ParamSpec* find(std::string_view name) const;
  const ParamSpec& spec(std::string_view name) const;
  std::optional<std::size_t> index_of(std::string_view name) const;
  /// Spec indices, parents before children, ties broken by declaration order.
  const std::vector<std::size_t>& topological_order() const { return order_; }

  /// True iff every ancestor condition of `spec` is satisfied by `cfg`.
  bool is_active(const ParamSpec& spec, const Config& cfg) const;

  TransformedConfig transform(const Config& cfg) const;

  /// Copy with every name (and condition parent) prefixed by `prefix`.
  SearchSpace prefixed(const std::string& prefix) const;
  /// Specs under `prefix`, with the prefix stripped.
  Config slice(const Config& cfg, const std::string& prefix) const;

  bool operator==(const SearchSpace& o) const { return specs_ == o.specs_; }

 private:
  std::vector<ParamSpec> specs_;
  std::vector<std::size_t> order_;
};

/// Concatenates spaces; names must stay unique.
SearchSpace concat(const std::vector<SearchSpace>& parts);

struct Violation {
  enum class Kind { unknown_name, missing_active, extra_inactive, out_of_bounds, wrong_type };
  Kind kind;
  std::string param;
  std::string message;
};

/// Empty result means the configuration is valid.
std::vector<Violation> validate(const SearchSpace& space, const Config& cfg);
inline bool is_valid(const SearchSpace& space, const Config& cfg) { return validate(space, cfg).empty(); }

Value sample_param(const ParamSpec& spec, Rng& rng);
Config sample_uniform(const SearchSpace& space, Rng& rng);

/// Full Cartesian grid, canonicalized under conditions and de-duplicated (first occurrence kept).
std::vector<Config> grid(const SearchSpace& space, std::size_t resolution);

/// Drops parameters whose condition is not met.
Config canonicalize(const SearchSpace& space, const Config& cfg);
/// Drops inactive parameters and samples missing active ones (topological order).
Config repair(const SearchSpace& space, const Config& cfg, Rng& rng);

std::size_t encoded_dim(const SearchSpace& space);
/// Fixed-length [0,1] encoding: numerics min-max scaled on tuner scale, categoricals one-hot,
/// conditional specs followed by an activity indicator; inactive numerics encode as 0.5 and
/// inactive categoricals as their first level.
std::vector<double> encode_numeric(const SearchSpace& space, const Config& cfg);

/// Throws IncompatibleSpace unless names, kinds, bounds, levels, trafos and conditions agree.
void check_compatible(const SearchSpace& expected, const SearchSpace& actual);

}  // namespace hpo
