#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace witness_forge {

enum class ReproduceCase {
  Bell,
  Tmsv,
  TmsvRadius,
  SubtractedGlobal,
  SubtractedLocal,
  FourmodeAppc,
  Table1,
  Fig2Point,
  LossInvariance,
};

std::string_view to_string(ReproduceCase c);
std::optional<ReproduceCase> parse_reproduce_case(std::string_view name);
const std::vector<ReproduceCase>& all_reproduce_cases();

struct ReproduceRow {
  std::string quantity;
  double computed;
  double target;
  double tolerance;
  bool graded;  // ungraded rows are printed for reference only
  bool pass;
};

struct ReproduceReport {
  ReproduceCase which;
  std::vector<ReproduceRow> rows;
  double seconds = 0.0;

  bool passed() const;
};

struct ReproduceOptions {
  std::uint64_t seed = 0;
  int threads = 0;
};

ReproduceReport reproduce(ReproduceCase which, const ReproduceOptions& options = {});

/// Fixed-width table, 6 significant digits.
std::string format_report(const ReproduceReport& report);

}  // namespace witness_forge
