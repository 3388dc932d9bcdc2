#include "pelflow/report.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include <fmt/format.h>

namespace pelflow {

namespace {

struct Row {
  const char* label;
  std::function<std::optional<double>(const MetricsReport&)> value;
  int precision;
};

const std::vector<Row>& rows() {
  static const std::vector<Row> r = {
      {"MSE_x", [](const MetricsReport& m) { return m.mse ? std::optional(m.mse->x) : std::nullopt; }, 4},
      {"MSE_y", [](const MetricsReport& m) { return m.mse ? std::optional(m.mse->y) : std::nullopt; }, 4},
      {"bias_x", [](const MetricsReport& m) { return m.bias ? std::optional(m.bias->x) : std::nullopt; }, 4},
      {"bias_y", [](const MetricsReport& m) { return m.bias ? std::optional(m.bias->y) : std::nullopt; }, 4},
      {"IMC(dB)", [](const MetricsReport& m) { return std::optional(m.imc_db); }, 2},
      {"DFD^2", [](const MetricsReport& m) { return std::optional(m.mean_sq_dfd); }, 3},
  };
  return r;
}

bool has_truth(std::span<const VariantReport> reports) {
  for (const auto& r : reports) {
    if (r.metrics.mse) return true;
  }
  return false;
}

bool truth_row(const Row& row) { return row.label[0] == 'M' || row.label[0] == 'b'; }

std::string csv_number(double v) {
  if (std::isinf(v)) v = v > 0 ? kImcInfSentinel : -kImcInfSentinel;
  return fmt::format("{:.10g}", v);
}

}  // namespace

std::string format_table(std::span<const VariantReport> reports) {
  const bool truth = has_truth(reports);
  std::string out = fmt::format("{:<10}", "");
  for (const auto& r : reports) out += fmt::format("{:>12}", r.name);
  out += '\n';
  for (const auto& row : rows()) {
    if (truth_row(row) && !truth) continue;
    out += fmt::format("{:<10}", row.label);
    for (const auto& r : reports) {
      const auto v = row.value(r.metrics);
      if (!v) {
        out += fmt::format("{:>12}", "-");
      } else if (std::isinf(*v)) {
        out += fmt::format("{:>12}", *v > 0 ? "inf" : "-inf");
      } else {
        out += fmt::format("{:>12.{}f}", *v, row.precision);
      }
    }
    out += '\n';
  }
  return out;
}

std::string format_csv(std::span<const VariantReport> reports) {
  const bool truth = has_truth(reports);
  std::string out = "metric";
  for (const auto& r : reports) out += "," + r.name;
  out += '\n';
  for (const auto& row : rows()) {
    if (truth_row(row) && !truth) continue;
    out += row.label;
    for (const auto& r : reports) {
      const auto v = row.value(r.metrics);
      out += ",";
      if (v) out += csv_number(*v);
    }
    out += '\n';
  }
  return out;
}

std::string format_pair_imc_csv(std::span<const VariantReport> reports) {
  std::string out = "pair";
  std::size_t pairs = 0;
  for (const auto& r : reports) {
    out += "," + r.name;
    pairs = std::max(pairs, r.metrics.per_pair_imc_db.size());
  }
  out += '\n';
  for (std::size_t k = 0; k < pairs; ++k) {
    out += fmt::format("{}", k + 1);
    for (const auto& r : reports) {
      out += ",";
      if (k < r.metrics.per_pair_imc_db.size()) out += csv_number(r.metrics.per_pair_imc_db[k]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace pelflow
