#pragma once

#include <span>
#include <string>

#include "pelflow/metrics.hpp"

namespace pelflow {

struct VariantReport {
  std::string name;
  MetricsReport metrics;
};

/// Fixed-width table, one column per variant and rows MSE_x, MSE_y,
/// bias_x, bias_y, IMC(dB), DFD^2. The MSE and bias rows are left out when
/// no variant carries ground-truth metrics. Infinite IMC prints as "inf".
std::string format_table(std::span<const VariantReport> reports);

/// Same layout as CSV (`metric,<variant>...`); infinite IMC is written as
/// kImcInfSentinel.
std::string format_csv(std::span<const VariantReport> reports);

/// `pair,<variant>...` with the IMC of every consecutive frame pair.
std::string format_pair_imc_csv(std::span<const VariantReport> reports);

}  // namespace pelflow
