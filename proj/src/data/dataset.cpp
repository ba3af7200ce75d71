#include "hpo/data/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "hpo/core/errors.hpp"

namespace hpo {

std::string_view to_string(TaskType task) {
  return task == TaskType::classification ? "classification" : "regression";
}

Column Column::numeric(std::string name, std::vector<double> values) {
  return Column{std::move(name), ColumnType::numeric, std::move(values), {}};
}

Column Column::categorical(std::string name, std::vector<std::string> levels, std::vector<double> codes) {
  return Column{std::move(name), ColumnType::categorical, std::move(codes), std::move(levels)};
}

bool Column::has_missing() const {
  return std::any_of(values.begin(), values.end(), [](double v) { return std::isnan(v); });
}

namespace {

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string Column::cell(std::size_t row) const {
  const double v = values[row];
  if (std::isnan(v)) return "NA";
  if (type == ColumnType::categorical) return levels[static_cast<std::size_t>(v)];
  return format_number(v);
}

Dataset::Dataset(std::vector<Column> features, std::vector<double> target, TaskType task,
                 std::vector<std::string> class_labels, std::string target_name)
    : columns_(std::move(features)),
      target_(std::move(target)),
      task_(task),
      class_labels_(std::move(class_labels)),
      target_name_(std::move(target_name)) {
  n_rows_ = columns_.empty() ? target_.size() : columns_.front().values.size();
  for (const auto& c : columns_) {
    if (c.values.size() != n_rows_) throw InvalidArgument("column '" + c.name + "' has inconsistent length");
    if (c.type == ColumnType::categorical)
      for (double v : c.values)
        if (!std::isnan(v) && (v < 0 || v >= static_cast<double>(c.levels.size()) || v != std::floor(v)))
          throw InvalidArgument("column '" + c.name + "' has an invalid level code");
  }
  std::vector<std::string> names;
  for (const auto& c : columns_) names.push_back(c.name);
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end())
    throw InvalidArgument("column names must be unique");
  if (!target_.empty()) {
    if (target_.size() != n_rows_) throw InvalidArgument("target length differs from row count");
    for (double y : target_)
      if (std::isnan(y)) throw InvalidArgument("target has missing entries");
    if (task_ == TaskType::classification) {
      if (class_labels_.empty()) throw InvalidArgument("classification target needs class labels");
      for (double y : target_)
        if (y < 0 || y >= static_cast<double>(class_labels_.size()) || y != std::floor(y))
          throw InvalidArgument("class code out of range");
    }
  }
}

std::optional<std::size_t> Dataset::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < columns_.size(); ++j)
    if (columns_[j].name == name) return j;
  return std::nullopt;
}

std::vector<std::size_t> Dataset::class_codes() const {
  std::vector<std::size_t> out(target_.size());
  std::transform(target_.begin(), target_.end(), out.begin(), [](double y) { return static_cast<std::size_t>(y); });
  return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(class_labels_.size(), 0);
  for (double y : target_) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

bool Dataset::has_missing() const {
  return std::any_of(columns_.begin(), columns_.end(), [](const Column& c) { return c.has_missing(); });
}

bool Dataset::has_categorical() const {
  return std::any_of(columns_.begin(), columns_.end(),
                     [](const Column& c) { return c.type == ColumnType::categorical; });
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<Column> cols;
  cols.reserve(columns_.size());
  for (const auto& c : columns_) {
    Column s{c.name, c.type, {}, c.levels};
    s.values.reserve(rows.size());
    for (std::size_t r : rows) s.values.push_back(c.values.at(r));
    cols.push_back(std::move(s));
  }
  std::vector<double> y;
  if (!target_.empty()) {
    y.reserve(rows.size());
    for (std::size_t r : rows) y.push_back(target_.at(r));
  }
  Dataset out(std::move(cols), std::move(y), task_, class_labels_, target_name_);
  out.n_rows_ = rows.size();
  return out;
}

Dataset Dataset::with_columns(std::vector<Column> columns) const {
  Dataset out(std::move(columns), target_, task_, class_labels_, target_name_);
  if (out.columns_.empty()) out.n_rows_ = n_rows_;
  if (out.n_rows_ != n_rows_) throw InvalidArgument("replacement columns change the row count");
  return out;
}

std::vector<double> Dataset::numeric_matrix() const {
  const std::size_t p = columns_.size();
  std::vector<double> x(n_rows_ * p);
  for (std::size_t j = 0; j < p; ++j) {
    const auto& c = columns_[j];
    if (c.type != ColumnType::numeric)
      throw CapabilityError("column '" + c.name + "' is categorical; encode it first");
    for (std::size_t i = 0; i < n_rows_; ++i) {
      if (std::isnan(c.values[i])) throw CapabilityError("column '" + c.name + "' has missing values; impute first");
      x[i * p + j] = c.values[i];
    }
  }
  return x;
}

bool Dataset::operator==(const Dataset& o) const {
  if (n_rows_ != o.n_rows_ || columns_.size() != o.columns_.size() || task_ != o.task_ ||
      target_name_ != o.target_name_ || target_.size() != o.target_.size())
    return false;
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    const auto& a = columns_[j];
    const auto& b = o.columns_[j];
    if (a.name != b.name || a.type != b.type) return false;
    for (std::size_t i = 0; i < n_rows_; ++i) {
      if (a.is_missing(i) != b.is_missing(i)) return false;
      if (a.is_missing(i)) continue;
      if (a.type == ColumnType::numeric ? a.values[i] != b.values[i] : a.cell(i) != b.cell(i)) return false;
    }
  }
  for (std::size_t i = 0; i < target_.size(); ++i) {
    if (task_ == TaskType::classification) {
      if (class_labels_[static_cast<std::size_t>(target_[i])] != o.class_labels_[static_cast<std::size_t>(o.target_[i])])
        return false;
    } else if (target_[i] != o.target_[i]) {
      return false;
    }
  }
  return true;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

bool is_missing_cell(const std::string& s) { return s.empty() || s == "NA"; }

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Dataset read_csv(std::istream& in, const std::string& target, std::optional<TaskType> task) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("CSV is empty");
  const auto header = split_csv_line(line);
  std::vector<std::vector<std::string>> cells(header.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    ++row;
    if (fields.size() != header.size())
      throw InvalidArgument("CSV row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                            " fields, expected " + std::to_string(header.size()));
    for (std::size_t j = 0; j < fields.size(); ++j) cells[j].push_back(std::move(fields[j]));
  }
  auto target_it = std::find(header.begin(), header.end(), target);
  if (target_it == header.end()) throw InvalidArgument("target column '" + target + "' not in CSV header");
  const std::size_t tj = static_cast<std::size_t>(target_it - header.begin());

  std::vector<Column> cols;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j == tj) continue;
    bool numeric = true;
    for (const auto& s : cells[j])
      if (!is_missing_cell(s) && !parse_number(s)) {
        numeric = false;
        break;
      }
    if (numeric) {
      std::vector<double> v;
      for (const auto& s : cells[j])
        v.push_back(is_missing_cell(s) ? std::numeric_limits<double>::quiet_NaN() : *parse_number(s));
      cols.push_back(Column::numeric(header[j], std::move(v)));
    } else {
      std::vector<std::string> levels;
      std::map<std::string, double> code;
      std::vector<double> v;
      for (const auto& s : cells[j]) {
        if (is_missing_cell(s)) {
          v.push_back(std::numeric_limits<double>::quiet_NaN());
          continue;
        }
        auto [it, inserted] = code.emplace(s, static_cast<double>(levels.size()));
        if (inserted) levels.push_back(s);
        v.push_back(it->second);
      }
      cols.push_back(Column::categorical(header[j], std::move(levels), std::move(v)));
    }
  }

  const auto& ycells = cells[tj];
  bool numeric_target = true;
  for (const auto& s : ycells) {
    if (is_missing_cell(s)) throw InvalidArgument("target column has missing entries");
    if (!parse_number(s)) numeric_target = false;
  }
  const TaskType kind = task.value_or(numeric_target ? TaskType::regression : TaskType::classification);
  std::vector<double> y;
  std::vector<std::string> labels;
  if (kind == TaskType::regression) {
    if (!numeric_target) throw InvalidArgument("regression target must be numeric");
    for (const auto& s : ycells) y.push_back(*parse_number(s));
  } else {
    labels.assign(ycells.begin(), ycells.end());
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    for (const auto& s : ycells)
      y.push_back(static_cast<double>(std::lower_bound(labels.begin(), labels.end(), s) - labels.begin()));
  }
  return Dataset(std::move(cols), std::move(y), kind, std::move(labels), target);
}

Dataset read_csv_file(const std::string& path, const std::string& target, std::optional<TaskType> task) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  return read_csv(in, target, task);
}

void write_csv(std::ostream& out, const Dataset& data) {
  for (const auto& c : data.columns()) out << quote_if_needed(c.name) << ',';
  out << quote_if_needed(data.target_name()) << '\n';
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    for (const auto& c : data.columns()) out << (c.is_missing(i) ? std::string() : quote_if_needed(c.cell(i))) << ',';
    if (data.labeled()) {
      const double y = data.target()[i];
      out << (data.task() == TaskType::classification ? quote_if_needed(data.class_labels()[static_cast<std::size_t>(y)])
                                                      : format_number(y));
    }
    out << '\n';
  }
}

}  // namespace hpo
