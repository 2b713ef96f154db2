#include "treeseq/eval/table.hpp"

#include <charconv>
#include <cstdio>
#include <nlohmann/json.hpp>

#include "treeseq/errors.hpp"

namespace treeseq::eval {

namespace {

std::string printf_string(const char* format, double a, double b = 0.0) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, a, b);
  return buf;
}

std::string format_p(double p) { return printf_string("%.4f", p); }

nlohmann::json cell_json(const std::string& cell) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec == std::errc() && ptr == cell.data() + cell.size()) return v;
  return cell;
}

}  // namespace

TableFormat parse_table_format(std::string_view name) {
  if (name == "tsv") return TableFormat::tsv;
  if (name == "json") return TableFormat::json;
  throw ValidationError("unknown table format '" + std::string(name) + "' (expected tsv or json)");
}

std::string format_metric(double value) { return printf_string("%.3f", value); }

std::string format_with_delta(double value, double delta) {
  // Avoid "-0.000" for deltas that round to zero.
  const std::string d = printf_string("%.3f", delta);
  return format_metric(value) + " (" + (d == "-0.000" ? std::string("0.000") : d) + ")";
}

std::string format_mean_std(const Summary& summary) {
  return printf_string("%.1f (%.1f)", 100.0 * summary.mean, 100.0 * summary.stddev);
}

std::string significance_mark(double p_value) { return p_value < 0.05 ? "*" : ""; }

std::string emit_table(const Table& table, TableFormat format) {
  for (const auto& row : table.rows) {
    if (row.cells.size() != table.metrics.size()) {
      throw ValidationError("row '" + row.system + "' has " + std::to_string(row.cells.size()) + " cells for " +
                            std::to_string(table.metrics.size()) + " metrics");
    }
  }
  if (format == TableFormat::json) {
    auto rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
      nlohmann::json r = nlohmann::json::object();
      r["system"] = row.system;
      for (std::size_t i = 0; i < row.cells.size(); ++i) r[table.metrics[i]] = cell_json(row.cells[i]);
      r["p"] = row.p_value ? cell_json(format_p(*row.p_value)) : nlohmann::json(nullptr);
      r["sig"] = row.p_value ? significance_mark(*row.p_value) : "";
      rows.push_back(std::move(r));
    }
    nlohmann::json doc = {{"columns", nlohmann::json::array()}, {"rows", std::move(rows)}};
    doc["columns"].push_back("system");
    for (const auto& m : table.metrics) doc["columns"].push_back(m);
    doc["columns"].push_back("p");
    doc["columns"].push_back("sig");
    return doc.dump(2) + "\n";
  }
  std::string out = "system";
  for (const auto& m : table.metrics) out += "\t" + m;
  out += "\tp\tsig\n";
  for (const auto& row : table.rows) {
    out += row.system;
    for (const auto& c : row.cells) out += "\t" + c;
    out += "\t" + (row.p_value ? format_p(*row.p_value) : std::string()) + "\t" +
           (row.p_value ? significance_mark(*row.p_value) : std::string()) + "\n";
  }
  return out;
}

}  // namespace treeseq::eval
