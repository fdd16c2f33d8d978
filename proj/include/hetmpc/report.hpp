#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "hetmpc/circuit.hpp"
#include "hetmpc/clock.hpp"

namespace hetmpc {

using MetaValue = std::variant<std::string, std::int64_t, double>;
// Ordered so rendering is stable.
using ReportMeta = std::vector<std::pair<std::string, MetaValue>>;

struct PartyReport {
  unsigned party = 0;
  StepTimings mean;
  StepTimings stddev;  // sample standard deviation; 0 for a single run
  friend bool operator==(const PartyReport&, const PartyReport&) = default;
};

struct OnlineReport {
  World world = World::kArithmetic;
  std::size_t repetitions = 0;
  ReportMeta meta;
  std::vector<PartyReport> parties;
  friend bool operator==(const OnlineReport&, const OnlineReport&) = default;
};

// runs[r] holds every party's timings for repetition r.
OnlineReport aggregate(std::span<const std::vector<StepTimings>> runs, World world,
                       ReportMeta meta = {});

enum class ReportFormat { kTable, kCsv, kJson };
ReportFormat parse_format(std::string_view name);

// Row labels of the table format, top to bottom.
std::array<std::string, 5> row_labels(World world);

std::string render_report(const OnlineReport& r, ReportFormat format);
// Table with one column group per report, e.g. {"Small", "Large"}.
std::string render_table(std::span<const OnlineReport> reports,
                         std::span<const std::string> group_labels = {});
OnlineReport parse_json_report(std::string_view text);

struct SweepRow {
  std::uint64_t size = 0;
  std::array<double, 2> communication_ms{0, 0};
  std::array<double, 2> online_ms{0, 0};
};

inline constexpr std::string_view kSweepCsvHeader =
    "size,party0_comm_ms,party1_comm_ms,party0_online_ms,party1_online_ms";
std::string render_sweep_row(const SweepRow& row);
std::string render_sweep_csv(std::span<const SweepRow> rows);

}  // namespace hetmpc
