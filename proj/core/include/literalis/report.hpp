#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "literalis/dynamics.hpp"
#include "literalis/stats.hpp"
#include "literalis/valharness.hpp"

namespace literalis {

/// Report cell: empty, text, integer count, or real value.
using Cell = std::variant<std::monostate, std::string, std::int64_t, double>;

/// A rectangular report. CSV prints reals with 4 decimals; JSON keeps full
/// precision.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void write_csv(std::ostream& out) const;
  void write_json(std::ostream& out) const;
};

Cell cell(const std::optional<double>& v);

Table hit_rate_report(const HitRateTable& t);
Table gradient_report(const std::vector<GradientRow>& rows);
Table comparison_report(const std::vector<stats::PairwiseComparison>& rows);
Table trigger_report(const std::vector<TriggerRow>& rows);
Table dynamics_report(const std::vector<DynamicsRow>& rows);
Table alteration_report(const AlterationSummary& s);
Table trajectory_report(const std::vector<TrajectoryRow>& rows);
Table sli_table_report(const std::vector<SliTableRow>& rows);

}  // namespace literalis
