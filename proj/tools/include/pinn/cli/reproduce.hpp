#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pinn/metrics.hpp"
#include "pinn/optimizer.hpp"

namespace pinn::cli {

struct PaperValue {
  std::string field;
  NormKind kind = NormKind::L2;
  double paper = 0.0;
  /// Gated values must come within `tolerance_factor` x paper on the best seed.
  bool gated = false;
};

struct TableRow {
  std::string pde;
  std::vector<std::size_t> widths;
  std::vector<PaperValue> values;
};

struct TableSpec {
  int id = 0;
  std::size_t iterations = 0;
  double tolerance_factor = 10.0;
  std::vector<TableRow> rows;
};

/// Tables 1, 2 (500 iterations) and 6, 7 (5000 iterations). ConfigError otherwise.
const TableSpec& paper_table(int id);

struct SeedRun {
  std::uint64_t seed = 0;
  TrainReport report;
  /// Measured absolute error per PaperValue of the row.
  std::vector<double> measured;
  /// max over gated values of measured / threshold (over all values if none is gated).
  double score = 0.0;
};

struct RowResult {
  TableRow row;
  std::vector<SeedRun> runs;
  std::size_t best = 0;
  std::size_t median = 0;
  bool gated = false;
  bool pass = true;
};

struct Reproduction {
  TableSpec table;
  std::vector<std::uint64_t> seeds;
  std::size_t iterations = 0;
  std::vector<RowResult> rows;

  bool pass() const;
};

/// Trains every row of the table once per seed (Seeds::from_base). The
/// iteration budget can be overridden for smoke runs; thresholds stay the same.
Reproduction reproduce(int table, const std::vector<std::uint64_t>& seeds,
                       std::optional<std::size_t> iterations = std::nullopt,
                       std::ostream* progress = nullptr);

double measured_value(const ErrorReport& errors, const PaperValue& value);

std::string format_reproduction(const Reproduction& result);
nlohmann::json to_json(const Reproduction& result);

}  // namespace pinn::cli
