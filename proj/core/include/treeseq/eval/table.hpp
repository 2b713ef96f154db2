#pragma once

#include <optional>
#include <string>
#include <vector>

#include "treeseq/eval/metrics.hpp"

namespace treeseq::eval {

/// A row of preformatted metric cells, optionally with a p-value.
struct TableRow {
  std::string system;
  std::vector<std::string> cells;
  std::optional<double> p_value;
};

struct Table {
  std::vector<std::string> metrics;
  std::vector<TableRow> rows;
};

enum class TableFormat { tsv, json };

TableFormat parse_table_format(std::string_view name);

/// 3 decimals: "0.712".
std::string format_metric(double value);
/// "0.712 (-0.036)"
std::string format_with_delta(double value, double delta);
/// "83.4 (0.3)" from fractions: mean and std scaled to percent, 1 decimal.
std::string format_mean_std(const Summary& summary);
/// "*" when p < 0.05, empty otherwise.
std::string significance_mark(double p_value);

/// Columns: system, the metrics in order, then p and sig. Throws ValidationError
/// for ragged rows. JSON writes numeric cells as numbers holding the values shown in the TSV.
std::string emit_table(const Table& table, TableFormat format);

}  // namespace treeseq::eval
