#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hpo {

enum class ColumnType { numeric, categorical };
enum class TaskType { regression, classification };

std::string_view to_string(TaskType task);

/// One feature column. Missing cells are NaN. Categorical cells hold level codes.
struct Column {
  std::string name;
  ColumnType type = ColumnType::numeric;
  std::vector<double> values;
  std::vector<std::string> levels;

  static Column numeric(std::string name, std::vector<double> values);
  static Column categorical(std::string name, std::vector<std::string> levels, std::vector<double> codes);

  bool is_missing(std::size_t row) const { return std::isnan(values[row]); }
  bool has_missing() const;
  /// Cell as text: the number, the level name, or "NA".
  std::string cell(std::size_t row) const;
};

/// Feature table plus target. The target may be empty for prediction-only tables.
/// Classification targets store class codes 0..g-1 indexing `class_labels`; for
/// binary tasks code 1 is the positive class.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<Column> features, std::vector<double> target, TaskType task,
          std::vector<std::string> class_labels = {}, std::string target_name = "y");

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_features() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }
  const Column& column(std::size_t j) const { return columns_[j]; }
  std::optional<std::size_t> column_index(const std::string& name) const;

  bool labeled() const { return !target_.empty(); }
  std::span<const double> target() const { return target_; }
  TaskType task() const { return task_; }
  const std::vector<std::string>& class_labels() const { return class_labels_; }
  std::size_t n_classes() const { return class_labels_.size(); }
  const std::string& target_name() const { return target_name_; }
  /// Class code per row (classification only).
  std::vector<std::size_t> class_codes() const;
  std::vector<std::size_t> class_counts() const;

  bool has_missing() const;
  bool has_categorical() const;

  Dataset subset(std::span<const std::size_t> rows) const;
  /// Same rows and target, new feature columns.
  Dataset with_columns(std::vector<Column> columns) const;

  /// Dense row-major numeric design; throws CapabilityError on categorical or missing cells.
  std::vector<double> numeric_matrix() const;

  /// Cell-wise equality (categorical cells compared by level name).
  bool operator==(const Dataset& o) const;

 private:
  std::vector<Column> columns_;
  std::vector<double> target_;
  TaskType task_ = TaskType::regression;
  std::vector<std::string> class_labels_;
  std::string target_name_ = "y";
  std::size_t n_rows_ = 0;
};

/// CSV with a header row. Empty cells and "NA" are missing. A column whose
/// non-missing cells all parse as numbers is numeric, otherwise categorical
/// (levels in order of first appearance). Classification class labels are sorted.
Dataset read_csv(std::istream& in, const std::string& target, std::optional<TaskType> task = std::nullopt);
Dataset read_csv_file(const std::string& path, const std::string& target, std::optional<TaskType> task = std::nullopt);
void write_csv(std::ostream& out, const Dataset& data);

}  // namespace hpo
