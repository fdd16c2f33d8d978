#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hetmpc/circuit.hpp"
#include "hetmpc/clock.hpp"
#include "hetmpc/report.hpp"
#include "hetmpc/wire.hpp"

namespace hetmpc {

enum class Role { kParty0, kParty1, kLoopback };

struct RunConfig {
  Role role = Role::kLoopback;
  AppId app = AppId::kInnerProduct;
  // Inner product: vector length. Millionaire: input bit length.
  std::uint64_t size = 128;
  // Ring bit length l for the inner product.
  unsigned bitlen = 16;
  MillionaireVariant variant = MillionaireVariant::kTree;
  std::string connect_host;
  std::uint16_t connect_port = 0;
  std::optional<std::uint16_t> listen_port;
  std::array<double, 2> throttle{1.0, 1.0};  // TCP roles use throttle[role]
  ClockKind clock = ClockKind::kReal;
  double latency_ms = 0.1;
  std::size_t reps = 10;
  std::uint64_t seed = 1;
  ReportFormat format = ReportFormat::kTable;
  std::optional<std::pair<unsigned, unsigned>> sweep;  // exponents of two, inclusive
  bool time_input_sharing = false;
  bool same_inputs = false;  // both parties draw the same input stream
  std::string dump_circuit_path;
  std::string triples_path;
  std::vector<std::string> warnings;
};

// Throws UsageError naming the offending flag.
RunConfig parse_args(const std::vector<std::string>& args);
RunConfig parse_args(int argc, const char* const* argv);

Circuit build_circuit(const RunConfig& cfg);
HelloParams hello_for(const RunConfig& cfg);
// Deterministic private inputs of `party` derived from the run seed.
std::vector<u64> generate_inputs(const RunConfig& cfg, const Circuit& c, unsigned party);

struct ExperimentResult {
  OnlineReport report;
  std::vector<u64> outputs;           // last repetition
  std::vector<u64> expected_outputs;  // plaintext oracle; loopback only
  bool outputs_match = true;          // parties agree (and match the oracle in loopback)
  std::array<std::vector<std::uint8_t>, 2> transcripts;  // concatenated over reps
  std::size_t round_count = 0;
};

ExperimentResult run_experiment(const RunConfig& cfg);

// One row per size 2^lo .. 2^hi. Rows are written to `out` as they finish;
// a failure writes "# partial: <reason>" and rethrows.
std::vector<SweepRow> run_sweep(const RunConfig& cfg, std::ostream& out);

// Full CLI behavior; returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hetmpc
