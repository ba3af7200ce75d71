#include "hpo/learn/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hpo/core/errors.hpp"
#include "hpo/data/resampling.hpp"

namespace hpo {

namespace {

constexpr const char* kMissingLevel = ".MISSING";

class IdentityOp : public FittedOp {
 public:
  Dataset transform(const Dataset& data) const override { return data; }
};

// ---------------------------------------------------------------- impute

struct ImputeState : FittedOp {
  std::vector<std::string> names;
  std::vector<double> fill;             // per column; NaN for categorical
  std::vector<char> indicator;          // numeric columns that get a ".missing" column
  std::vector<std::vector<std::string>> levels;  // categorical level lists after fitting
  std::vector<double> missing_code;     // categorical code used for missing cells

  Dataset transform(const Dataset& data) const override {
    if (data.n_features() != names.size()) throw InvalidArgument("impute: column count differs from training data");
    std::vector<Column> out;
    std::vector<Column> extra;
    for (std::size_t j = 0; j < names.size(); ++j) {
      const auto& c = data.column(j);
      Column col = c;
      if (c.type == ColumnType::numeric) {
        std::vector<double> flag(c.values.size(), 0.0);
        for (std::size_t i = 0; i < col.values.size(); ++i)
          if (std::isnan(col.values[i])) {
            col.values[i] = fill[j];
            flag[i] = 1.0;
          }
        if (indicator[j]) extra.push_back(Column::numeric(c.name + ".missing", std::move(flag)));
      } else {
        col.levels = levels[j];
        for (auto& v : col.values)
          if (std::isnan(v)) v = missing_code[j];
      }
      out.push_back(std::move(col));
    }
    for (auto& e : extra) out.push_back(std::move(e));
    return data.with_columns(std::move(out));
  }
};

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

// ---------------------------------------------------------------- encode

struct EncodeState : FittedOp {
  std::vector<std::string> names;
  bool drop_first = false;

  Dataset transform(const Dataset& data) const override {
    if (data.n_features() != names.size()) throw InvalidArgument("encode: column count differs from training data");
    std::vector<Column> out;
    for (const auto& c : data.columns()) {
      if (c.type == ColumnType::numeric) {
        out.push_back(c);
        continue;
      }
      for (std::size_t l = drop_first ? 1 : 0; l < c.levels.size(); ++l) {
        std::vector<double> v(c.values.size(), 0.0);
        for (std::size_t i = 0; i < v.size(); ++i)
          if (!std::isnan(c.values[i]) && static_cast<std::size_t>(c.values[i]) == l) v[i] = 1.0;
        out.push_back(Column::numeric(c.name + "." + c.levels[l], std::move(v)));
      }
    }
    return data.with_columns(std::move(out));
  }
};

// ---------------------------------------------------------------- standardize

struct StandardizeState : FittedOp {
  std::vector<double> mean, scale;  // NaN mean marks a categorical column

  Dataset transform(const Dataset& data) const override {
    if (data.n_features() != mean.size()) throw InvalidArgument("standardize: column count differs from training data");
    std::vector<Column> out = data.columns();
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (out[j].type != ColumnType::numeric) continue;
      for (auto& v : out[j].values) v = (v - mean[j]) / scale[j];
    }
    return data.with_columns(std::move(out));
  }
};

// ---------------------------------------------------------------- filter

struct SelectState : FittedOp {
  std::vector<std::size_t> keep;
  std::size_t width = 0;

  Dataset transform(const Dataset& data) const override {
    if (data.n_features() != width) throw InvalidArgument("filter: column count differs from training data");
    std::vector<Column> out;
    for (auto j : keep) out.push_back(data.column(j));
    return data.with_columns(std::move(out));
  }
};

}  // namespace

double pearson(const std::vector<double>& a, std::span<const double> b) {
  double n = 0, sa = 0, sb = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!std::isnan(a[i]) && !std::isnan(b[i])) {
      n += 1;
      sa += a[i];
      sb += b[i];
    }
  if (n < 2) return 0.0;
  const double ma = sa / n, mb = sb / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!std::isnan(a[i]) && !std::isnan(b[i])) {
      sab += (a[i] - ma) * (b[i] - mb);
      saa += (a[i] - ma) * (a[i] - ma);
      sbb += (b[i] - mb) * (b[i] - mb);
    }
  if (saa <= 0 || sbb <= 0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

ImputeOp::ImputeOp()
    : space_({ParamSpec::categorical("method", {"mean", "median", "constant"}),
              ParamSpec::categorical("indicator", {"no", "yes"})}) {}

OpResult ImputeOp::fit_transform(const Dataset& train, const Config& cfg, Rng&) const {
  const std::string method = cfg.has("method") ? cfg.level("method") : "mean";
  const bool indicator = (cfg.has("indicator") ? cfg.level("indicator") : "yes") == "yes";
  auto st = std::make_shared<ImputeState>();
  const std::size_t p = train.n_features();
  st->fill.assign(p, std::numeric_limits<double>::quiet_NaN());
  st->indicator.assign(p, 0);
  st->levels.resize(p);
  st->missing_code.assign(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    const auto& c = train.column(j);
    st->names.push_back(c.name);
    std::vector<double> present;
    for (double v : c.values)
      if (!std::isnan(v)) present.push_back(v);
    if (c.type == ColumnType::numeric) {
      double f = 0.0;
      if (method == "mean" && !present.empty())
        f = std::accumulate(present.begin(), present.end(), 0.0) / static_cast<double>(present.size());
      else if (method == "median" && !present.empty())
        f = median_of(present);
      st->fill[j] = f;
      st->indicator[j] = indicator && present.size() < c.values.size();
    } else {
      st->levels[j] = c.levels;
      if (present.size() < c.values.size()) {
        st->levels[j].push_back(kMissingLevel);
        st->missing_code[j] = static_cast<double>(c.levels.size());
      } else {
        std::vector<std::size_t> count(c.levels.size(), 0);
        for (double v : present) ++count[static_cast<std::size_t>(v)];
        st->missing_code[j] =
            static_cast<double>(std::max_element(count.begin(), count.end()) - count.begin());
      }
    }
  }
  auto data = st->transform(train);
  return {std::move(st), std::move(data)};
}

EncodeOp::EncodeOp() : space_({ParamSpec::categorical("mode", {"one_hot", "dummy"})}) {}

OpResult EncodeOp::fit_transform(const Dataset& train, const Config& cfg, Rng&) const {
  auto st = std::make_shared<EncodeState>();
  for (const auto& c : train.columns()) st->names.push_back(c.name);
  st->drop_first = cfg.has("mode") && cfg.level("mode") == "dummy";
  auto data = st->transform(train);
  return {std::move(st), std::move(data)};
}

OpResult StandardizeOp::fit_transform(const Dataset& train, const Config&, Rng&) const {
  auto st = std::make_shared<StandardizeState>();
  for (const auto& c : train.columns()) {
    double n = 0, s = 0;
    for (double v : c.values)
      if (!std::isnan(v)) {
        n += 1;
        s += v;
      }
    const double m = n > 0 ? s / n : 0.0;
    double ss = 0;
    for (double v : c.values)
      if (!std::isnan(v)) ss += (v - m) * (v - m);
    const double sd = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    st->mean.push_back(c.type == ColumnType::numeric ? m : std::numeric_limits<double>::quiet_NaN());
    st->scale.push_back(sd > 0 ? sd : 1.0);
  }
  auto data = st->transform(train);
  return {std::move(st), std::move(data)};
}

FilterOp::FilterOp() : space_({ParamSpec::real("frac", 0.1, 1.0)}) {}

OpResult FilterOp::fit_transform(const Dataset& train, const Config& cfg, Rng&) const {
  const double frac = cfg.has("frac") ? cfg.number("frac") : 0.5;
  auto st = std::make_shared<SelectState>();
  st->width = train.n_features();
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t j = 0; j < train.n_features(); ++j)
    if (train.column(j).type == ColumnType::numeric)
      scored.push_back({std::abs(pearson(train.column(j).values, train.target())), j});
  const auto keep_n = static_cast<std::size_t>(std::ceil(frac * static_cast<double>(scored.size()) - 1e-12));
  std::stable_sort(scored.begin(), scored.end(), [](auto& a, auto& b) { return a.first > b.first; });
  std::vector<char> keep(train.n_features(), 0);
  for (std::size_t i = 0; i < std::min(keep_n, scored.size()); ++i) keep[scored[i].second] = 1;
  for (std::size_t j = 0; j < train.n_features(); ++j)
    if (keep[j] || train.column(j).type == ColumnType::categorical) st->keep.push_back(j);
  auto data = st->transform(train);
  return {std::move(st), std::move(data)};
}

SubsampleOp::SubsampleOp() : space_({ParamSpec::real("frac", 0.1, 1.0)}) {}

OpResult SubsampleOp::fit_transform(const Dataset& train, const Config& cfg, Rng& rng) const {
  const double frac = cfg.has("frac") ? cfg.number("frac") : 1.0;
  const std::size_t n = train.n_rows();
  const std::size_t m = std::min(n, std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(frac * static_cast<double>(n)))));
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::vector<std::size_t> strata;
  if (train.task() == TaskType::classification) strata = train.class_codes();
  auto picked = subsample_rows(rows, m, strata, rng);
  return {std::make_shared<IdentityOp>(), train.subset(picked)};
}

PreprocOpPtr make_op(const std::string& id) {
  if (id == "impute") return std::make_shared<ImputeOp>();
  if (id == "encode") return std::make_shared<EncodeOp>();
  if (id == "standardize") return std::make_shared<StandardizeOp>();
  if (id == "filter") return std::make_shared<FilterOp>();
  if (id == "subsample") return std::make_shared<SubsampleOp>();
  throw InvalidArgument("unknown preprocessing operator '" + id + "'");
}

}  // namespace hpo
