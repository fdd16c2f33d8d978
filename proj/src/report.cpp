#include "hetmpc/report.hpp"

#include <fmt/format.h>

#include <cmath>
#include <json.hpp>

#include "hetmpc/errors.hpp"

namespace hetmpc {
namespace {

using Json = nlohmann::ordered_json;

constexpr std::array<const char*, 5> kCellKeys{"local_gates_ms", "interactive_gate_ms",
                                               "layer_finish_ms", "communication_ms",
                                               "online_phase_ms"};

std::array<double, 5> cells_of(const StepTimings& t) {
  return {t.local_gates_ms, t.interactive_gate_ms, t.layer_finish_ms, t.communication_ms,
          t.online_phase_ms};
}

StepTimings timings_from(const std::array<double, 5>& c, unsigned party) {
  StepTimings t;
  t.local_gates_ms = c[0];
  t.interactive_gate_ms = c[1];
  t.layer_finish_ms = c[2];
  t.communication_ms = c[3];
  t.online_phase_ms = c[4];
  t.party = party;
  return t;
}

std::string meta_text(const MetaValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, std::string>) {
          return x;
        } else {
          return fmt::format("{}", x);
        }
      },
      v);
}

}  // namespace

OnlineReport aggregate(std::span<const std::vector<StepTimings>> runs, World world,
                       ReportMeta meta) {
  if (runs.empty()) throw DomainError("cannot aggregate zero runs");
  const std::size_t n_parties = runs.front().size();
  for (const auto& run : runs) {
    if (run.size() != n_parties) throw DomainError("runs disagree on the number of parties");
  }
  OnlineReport r;
  r.world = world;
  r.repetitions = runs.size();
  r.meta = std::move(meta);
  const double n = static_cast<double>(runs.size());
  for (std::size_t p = 0; p < n_parties; ++p) {
    std::array<double, 5> mean{}, sd{};
    for (const auto& run : runs) {
      const auto c = cells_of(run[p]);
      for (std::size_t i = 0; i < 5; ++i) mean[i] += c[i];
    }
    for (auto& m : mean) m /= n;
    if (runs.size() > 1) {
      for (const auto& run : runs) {
        const auto c = cells_of(run[p]);
        for (std::size_t i = 0; i < 5; ++i) sd[i] += (c[i] - mean[i]) * (c[i] - mean[i]);
      }
      for (auto& s : sd) s = std::sqrt(s / (n - 1));
    }
    const unsigned party = runs.front()[p].party;
    r.parties.push_back({party, timings_from(mean, party), timings_from(sd, party)});
  }
  return r;
}

ReportFormat parse_format(std::string_view name) {
  if (name == "table") return ReportFormat::kTable;
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  throw UsageError(fmt::format("unknown report format '{}' (table, csv, json)", name));
}

std::array<std::string, 5> row_labels(World world) {
  return {world == World::kArithmetic ? "Arithmetic local gates(ms)" : "Boolean local gates(ms)",
          "Interactive gate(ms)", "Layer finish(ms)", "Communication(ms)", "Online phase(ms)"};
}

std::string render_table(std::span<const OnlineReport> reports,
                         std::span<const std::string> group_labels) {
  if (reports.empty()) throw DomainError("nothing to render");
  constexpr int kLabel = 28;
  constexpr int kCell = 12;
  const auto labels = row_labels(reports.front().world);
  std::string out;
  if (!group_labels.empty()) {
    out += fmt::format("{:<{}}", "", kLabel);
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const int width = kCell * static_cast<int>(reports[i].parties.size());
      out += fmt::format("{:>{}}", i < group_labels.size() ? group_labels[i] : "", width);
    }
    out += '\n';
  }
  out += fmt::format("{:<{}}", "", kLabel);
  for (const auto& r : reports) {
    for (const auto& p : r.parties) out += fmt::format("{:>{}}", fmt::format("P{}", p.party), kCell);
  }
  out += '\n';
  for (std::size_t row = 0; row < labels.size(); ++row) {
    out += fmt::format("{:<{}}", labels[row], kLabel);
    for (const auto& r : reports) {
      for (const auto& p : r.parties) out += fmt::format("{:>{}.3f}", cells_of(p.mean)[row], kCell);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::string render_csv(const OnlineReport& r) {
  std::string out;
  out += fmt::format("# world={}\n# repetitions={}\n", r.world == World::kArithmetic ? 'A' : 'B',
                     r.repetitions);
  for (const auto& [key, value] : r.meta) out += fmt::format("# {}={}\n", key, meta_text(value));
  out += "party";
  for (const char* k : kCellKeys) out += fmt::format(",{}", k);
  for (const char* k : kCellKeys) out += fmt::format(",{}_sd", k);
  out += '\n';
  for (const auto& p : r.parties) {
    out += fmt::format("{}", p.party);
    for (double v : cells_of(p.mean)) out += fmt::format(",{}", v);
    for (double v : cells_of(p.stddev)) out += fmt::format(",{}", v);
    out += '\n';
  }
  return out;
}

Json to_json(const OnlineReport& r) {
  Json meta = Json::object();
  for (const auto& [key, value] : r.meta) {
    std::visit([&](const auto& x) { meta[key] = x; }, value);
  }
  Json parties = Json::array();
  for (const auto& p : r.parties) {
    Json cells = Json::object(), sd = Json::object();
    const auto m = cells_of(p.mean);
    const auto s = cells_of(p.stddev);
    for (std::size_t i = 0; i < 5; ++i) {
      cells[kCellKeys[i]] = m[i];
      sd[kCellKeys[i]] = s[i];
    }
    parties.push_back({{"party", p.party}, {"cells", cells}, {"stddev", sd}});
  }
  return {{"meta", meta},
          {"world", r.world == World::kArithmetic ? "A" : "B"},
          {"repetitions", r.repetitions},
          {"parties", parties}};
}

}  // namespace

std::string render_report(const OnlineReport& r, ReportFormat format) {
  switch (format) {
    case ReportFormat::kTable: return render_table(std::span(&r, 1));
    case ReportFormat::kCsv: return render_csv(r);
    case ReportFormat::kJson: return to_json(r).dump(2) + "\n";
  }
  throw UsageError("unknown report format");
}

OnlineReport parse_json_report(std::string_view text) {
  OnlineReport r;
  try {
    const Json j = Json::parse(text);
    const std::string world = j.at("world").get<std::string>();
    if (world != "A" && world != "B") throw DomainError(fmt::format("unknown world '{}'", world));
    r.world = world == "A" ? World::kArithmetic : World::kBoolean;
    r.repetitions = j.at("repetitions").get<std::size_t>();
    for (const auto& [key, value] : j.at("meta").items()) {
      if (value.is_string()) {
        r.meta.emplace_back(key, value.get<std::string>());
      } else if (value.is_number_integer()) {
        r.meta.emplace_back(key, value.get<std::int64_t>());
      } else if (value.is_number()) {
        r.meta.emplace_back(key, value.get<double>());
      } else {
        throw DomainError(fmt::format("meta field '{}' is not a string or number", key));
      }
    }
    for (const auto& p : j.at("parties")) {
      std::array<double, 5> m{}, s{};
      for (std::size_t i = 0; i < 5; ++i) {
        m[i] = p.at("cells").at(kCellKeys[i]).get<double>();
        s[i] = p.at("stddev").at(kCellKeys[i]).get<double>();
      }
      const unsigned party = p.at("party").get<unsigned>();
      r.parties.push_back({party, timings_from(m, party), timings_from(s, party)});
    }
  } catch (const Json::exception& e) {
    throw DomainError(fmt::format("malformed report JSON: {}", e.what()));
  }
  return r;
}

std::string render_sweep_row(const SweepRow& row) {
  return fmt::format("{},{},{},{},{}\n", row.size, row.communication_ms[0], row.communication_ms[1],
                     row.online_ms[0], row.online_ms[1]);
}

std::string render_sweep_csv(std::span<const SweepRow> rows) {
  std::string out(kSweepCsvHeader);
  out += '\n';
  for (const auto& row : rows) out += render_sweep_row(row);
  return out;
}

}  // namespace hetmpc
