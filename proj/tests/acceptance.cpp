// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hetmpc/bench.hpp"
#include "hetmpc/preprocessing.hpp"
#include "hetmpc/session.hpp"
#include "hetmpc/sharing.hpp"

using namespace hetmpc;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

std::vector<u64> bits_of(u64 v, std::size_t n) {
  std::vector<u64> out(n);
  for (std::size_t i = 0; i < n && i < 64; ++i) out[i] = (v >> i) & 1;
  return out;
}

LoopbackResult run_once(const Circuit& c, const LayerPlan& plan, std::vector<u64> x0,
                        std::vector<u64> x1, std::uint64_t seed) {
  LoopbackSetup s;
  s.circuit = &c;
  s.plan = &plan;
  auto [p0, p1] = deal_for(c, 1, seed);
  s.pools = {std::move(p0), std::move(p1)};
  s.inputs = {std::move(x0), std::move(x1)};
  s.mask_seeds = {hash64(seed, "masks", 0), hash64(seed, "masks", 1)};
  s.clock = ClockMode::virtual_clock(0.1);
  return run_loopback(std::move(s));
}

// Big-integer comparison of LSB-first bit vectors.
u64 greater(const std::vector<u64>& x, const std::vector<u64>& y) {
  for (std::size_t i = x.size(); i-- > 0;) {
    if (x[i] != y[i]) return x[i] > y[i] ? 1 : 0;
  }
  return 0;
}

Check correctness() {
  Check ck;
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t cases = 0;
  for (auto v : {MillionaireVariant::kRipple, MillionaireVariant::kTree}) {
    for (std::size_t n = 1; n <= 8; ++n) {
      const Circuit c = build_millionaire(n, v);
      const LayerPlan plan = assign_layers(c);
      for (u64 x = 0; x < (u64{1} << n) && ck.ok; ++x) {
        for (u64 y = 0; y < (u64{1} << n); ++y) {
          const auto r = run_once(c, plan, bits_of(x, n), bits_of(y, n), (x << 8) | y);
          ++cases;
          ck.expect(r.outputs_agree && r.party[0].outputs == std::vector<u64>{x > y ? 1u : 0u},
                    fmt::format("{} n_bits={} x={} y={}", variant_name(v), n, x, y));
        }
      }
    }
    for (std::size_t n : {32u, 1024u}) {
      const Circuit c = build_millionaire(n, v);
      const LayerPlan plan = assign_layers(c);
      SeededRng rng(n, "acceptance-millionaire", static_cast<unsigned>(v));
      for (int i = 0; i < 1000 && ck.ok; ++i) {
        std::vector<u64> x(n), y(n);
        for (auto& b : x) b = rng.next() & 1;
        // Every fourth case shares a long common prefix so the low bits decide.
        for (std::size_t k = 0; k < n; ++k) y[k] = (i % 4 == 0 && k > 2) ? x[k] : rng.next() & 1;
        const auto r = run_once(c, plan, x, y, rng.next());
        ++cases;
        ck.expect(r.outputs_agree && r.party[0].outputs == std::vector<u64>{greater(x, y)},
                  fmt::format("{} n_bits={} case {}", variant_name(v), n, i));
      }
    }
  }
  for (std::size_t n : {1u, 128u, 1024u}) {
    const Circuit c = build_inner_product(n, RingSpec(16));
    const LayerPlan plan = assign_layers(c);
    SeededRng rng(n, "acceptance-innerproduct", 0);
    for (int i = 0; i < 100 && ck.ok; ++i) {
      std::vector<u64> x(n), y(n);
      for (auto& e : x) e = rng.next_bits(16);
      for (auto& e : y) e = rng.next_bits(16);
      const auto r = run_once(c, plan, x, y, rng.next());
      ++cases;
      ck.expect(r.outputs_agree && r.party[0].outputs == eval_plaintext(c, x, y),
                fmt::format("innerproduct n={} case {}", n, i));
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ck.expect(secs < 300, fmt::format("took {:.1f} s", secs));
  if (ck.ok) ck.detail = fmt::format("{} cases in {:.1f} s", cases, secs);
  return ck;
}

Check sharing() {
  Check ck;
  {
    const RingSpec r(4);
    for (u64 x = 0; x < 16; ++x) {
      for (u64 m = 0; m < 16; ++m) {
        const auto [s0, s1] = arith_share_with_mask(x, m, r);
        ck.expect(arith_reconstruct(s0, s1) == x, "l=4 round trip");
        for (u64 y = 0; y < 16; ++y) {
          const auto [t0, t1] = arith_share_with_mask(y, (m * 7 + y) & 15, r);
          ck.expect(arith_reconstruct(s0 + t0, s1 + t1) == r.add(x, y), "l=4 homomorphism");
        }
      }
    }
  }
  for (unsigned bits : {16u, 32u}) {
    const RingSpec r(bits);
    SeededRng rng(bits, "acceptance-sharing", 0);
    for (int i = 0; i < 10000; ++i) {
      const u64 x = rng.next_bits(bits), y = rng.next_bits(bits);
      const auto [s0, s1] = arith_share(x, r, rng);
      const auto [t0, t1] = arith_share(y, r, rng);
      ck.expect(arith_reconstruct(s0, s1) == x, fmt::format("l={} round trip", bits));
      ck.expect(arith_reconstruct(s0 + t0, s1 + t1) == r.add(x, y), fmt::format("l={} homomorphism", bits));
      const BitVector bx = BitVector::from_u64(x, bits), by = BitVector::from_u64(y, bits);
      const auto [b0, b1] = bool_share(bx, rng);
      const auto [c0, c1] = bool_share(by, rng);
      BitVector want = bx;
      want ^= by;
      ck.expect(bool_reconstruct(b0, b1) == bx, fmt::format("l={} XOR round trip", bits));
      ck.expect(bool_reconstruct(b0 ^ c0, b1 ^ c1) == want, fmt::format("l={} XOR homomorphism", bits));
    }
  }
  for (unsigned bits : {4u, 16u, 32u, 64u}) {
    const RingSpec r(bits);
    auto [p0, p1] = deal_arith_triples(10000, r, bits);
    for (std::size_t i = 0; i < p0.size(); ++i) {
      const auto t0 = p0.at(i), t1 = p1.at(i);
      const unsigned __int128 a = r.add(t0.a, t1.a), b = r.add(t0.b, t1.b);
      ck.expect(r.add(t0.c, t1.c) == static_cast<u64>((a * b) & r.mask()), "arithmetic triple identity");
    }
  }
  auto [b0, b1] = deal_bool_triples(100000, 3);
  BitVector a = b0.a(), b = b0.b(), c = b0.c();
  a ^= b1.a();
  b ^= b1.b();
  c ^= b1.c();
  a &= b;
  ck.expect(a == c, "Boolean triple identity");
  return ck;
}


ExperimentResult experiment(std::vector<std::string> args) { return run_experiment(parse_args(args)); }

Check homogeneous_balance(std::string& note) {
  Check ck;
  const auto v = experiment({"--role", "loopback", "--size", "4096", "--clock", "virtual", "--throttle",
                             "1,1", "--latency-ms", "0.1", "--reps", "3"});
  const auto& p = v.report.parties;
  ck.expect(p[0].mean.communication_ms == p[1].mean.communication_ms, "virtual communication differs");
  for (const auto& q : p) {
    ck.expect(q.mean.communication_ms < 0.05 * q.mean.online_phase_ms,
              fmt::format("P{} communication {} of {}", q.party, q.mean.communication_ms,
                          q.mean.online_phase_ms));
  }
  note = fmt::format("virtual comm {:.3f}/{:.3f} ms", p[0].mean.communication_ms, p[0].mean.online_phase_ms);
  for (const char* size : {"4096", "131072"}) {
    const auto real = experiment({"--role", "loopback", "--size", size, "--clock", "real", "--throttle", "1,1",
                                  "--reps", "10"});
    const double a = real.report.parties[0].mean.online_phase_ms;
    const double b = real.report.parties[1].mean.online_phase_ms;
    const double gap = std::abs(a - b) / std::max(a, b);
    ck.expect(gap <= 0.02, fmt::format("n={} real online totals {:.4f} vs {:.4f} ms", size, a, b));
    note += fmt::format("; n={} real online {:.3f} vs {:.3f} ms ({:.2f}%)", size, a, b, 100 * gap);
  }
  return ck;
}

Check communication_dominance(std::string& note) {
  Check ck;
  const auto r = experiment({"--role", "loopback", "--app", "millionaire", "--size", "32", "--variant",
                             "tree", "--clock", "virtual", "--latency-ms", "1", "--throttle", "1,1",
                             "--reps", "2"});
  for (const auto& q : r.report.parties) {
    ck.expect(q.mean.communication_ms > 0.5 * q.mean.online_phase_ms,
              fmt::format("P{} communication {} of {}", q.party, q.mean.communication_ms,
                          q.mean.online_phase_ms));
  }
  note = fmt::format("communication {:.3f} of {:.3f} ms", r.report.parties[0].mean.communication_ms,
                     r.report.parties[0].mean.online_phase_ms);
  return ck;
}

struct SweepSet {
  std::string name;
  std::vector<SweepRow> rows;
  std::size_t rounds_at(std::size_t i) const { return round_counts[i]; }
  std::vector<std::size_t> round_counts;
};

std::vector<SweepSet> heterogeneous_sweeps() {
  std::vector<SweepSet> sets;
  const auto one = [&](std::string name, std::vector<std::string> args) {
    std::ostringstream sink;
    RunConfig cfg = parse_args(args);
    SweepSet s{std::move(name), run_sweep(cfg, sink), {}};
    for (const auto& row : s.rows) {
      RunConfig at = cfg;
      at.sweep.reset();
      at.size = row.size;
      s.round_counts.push_back(assign_layers(build_circuit(at)).round_count);
    }
    sets.push_back(std::move(s));
  };
  one("innerproduct", {"--role", "loopback", "--sweep", "6:12", "--clock", "virtual", "--throttle", "1,3",
                       "--latency-ms", "0.1", "--reps", "1"});
  one("millionaire", {"--role", "loopback", "--app", "millionaire", "--variant", "tree", "--sweep", "5:10",
                      "--clock", "virtual", "--throttle", "1,3", "--latency-ms", "0.1", "--reps", "1"});
  return sets;
}

Check heterogeneous_skew(const std::vector<SweepSet>& sets, std::string& note) {
  Check ck;
  for (const auto& s : sets) {
    for (const auto& row : s.rows) {
      ck.expect(row.communication_ms[0] > row.communication_ms[1],
                fmt::format("{} size {}: fast {} <= slow {}", s.name, row.size, row.communication_ms[0],
                            row.communication_ms[1]));
    }
    const auto ratio = [](const SweepRow& r) { return r.communication_ms[0] / r.communication_ms[1]; };
    const double small = ratio(s.rows.front()), large = ratio(s.rows.back());
    ck.expect(large >= 2 * small, fmt::format("{} ratio {} vs {}", s.name, large, small));
    const double stall = s.rows.back().communication_ms[0] / s.rows.back().online_ms[0];
    ck.expect(stall > 0.5, fmt::format("{} fast stall fraction {}", s.name, stall));
    note += fmt::format("{}{}: ratio {:.2f}x -> {:.2f}x, stall {:.1f}%", note.empty() ? "" : "; ", s.name,
                        small, large, 100 * stall);
  }
  return ck;
}

Check sensitivity(const std::vector<SweepSet>& sets) {
  Check ck;
  const double latency = quantize_virtual_ms(0.1);
  for (const auto& s : sets) {
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      if (i > 0) {
        ck.expect(s.rows[i].communication_ms[0] >= s.rows[i - 1].communication_ms[0],
                  fmt::format("{} fast comm drops at size {}", s.name, s.rows[i].size));
      }
      const double bound = latency * static_cast<double>(s.rounds_at(i));
      ck.expect(s.rows[i].communication_ms[1] <= bound,
                fmt::format("{} slow comm {} above {}", s.name, s.rows[i].communication_ms[1], bound));
      ck.expect(s.rows[i].communication_ms[1] == bound,
                fmt::format("{} slow comm {} != {}", s.name, s.rows[i].communication_ms[1], bound));
    }
  }
  return ck;
}

Check symmetry() {
  Check ck;
  std::vector<Circuit> circuits;
  for (std::size_t n : {1u, 2u, 7u, 128u, 1024u}) {
    for (unsigned l : {1u, 16u, 33u, 64u}) circuits.push_back(build_inner_product(n, RingSpec(l)));
  }
  for (std::size_t n : {1u, 2u, 5u, 32u, 100u, 1024u}) {
    circuits.push_back(build_millionaire(n, MillionaireVariant::kRipple));
    circuits.push_back(build_millionaire(n, MillionaireVariant::kTree));
  }
  for (const Circuit& c : circuits) {
    const LayerPlan plan = assign_layers(c);
    const auto r = run_once(c, plan, std::vector<u64>(c.input_count(0), 1),
                            std::vector<u64>(c.input_count(1), 0), 1);
    const std::string name = dump_circuit(c).substr(0, dump_circuit(c).find('\n'));
    ck.expect(r.frames[0] == r.frames[1], name + ": frame counts differ");
    ck.expect(r.layer_frames[0] == plan.round_count && r.layer_frames[1] == plan.round_count,
              name + ": layer frames != rounds");
    ck.expect(r.payload_bytes[0] == r.payload_bytes[1], name + ": payload bytes differ");
  }
  return ck;
}

Check determinism() {
  Check ck;
  for (std::vector<std::string> args :
       {std::vector<std::string>{"--role", "loopback", "--size", "256", "--reps", "3", "--seed", "11",
                                 "--clock", "virtual", "--throttle", "1,3"},
        {"--role", "loopback", "--app", "millionaire", "--size", "64", "--variant", "ripple", "--reps", "3",
         "--seed", "11", "--clock", "virtual", "--throttle", "2,1"}}) {
    const auto a = experiment(args);
    const auto b = experiment(args);
    ck.expect(a.transcripts == b.transcripts, args[3] + ": transcripts differ");
    ck.expect(a.outputs == b.outputs, args[3] + ": outputs differ");
    ck.expect(a.report == b.report, args[3] + ": virtual reports differ");
    ck.expect(render_report(a.report, ReportFormat::kJson) == render_report(b.report, ReportFormat::kJson),
              args[3] + ": rendered reports differ");
  }
  return ck;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Check report_format() {
  Check ck;
  const std::array<std::pair<World, const char*>, 2> cases{
      std::pair{World::kArithmetic, "table_arithmetic.txt"}, std::pair{World::kBoolean, "table_boolean.txt"}};
  for (const auto& [world, file] : cases) {
    const std::string golden = read_file(std::string(HETMPC_GOLDEN_DIR) + "/" + file);
    ck.expect(!golden.empty(), fmt::format("missing golden {}", file));
    // Rebuild the golden report from its own cells, then compare byte for byte.
    std::vector<std::vector<StepTimings>> runs(1);
    for (unsigned p = 0; p < 2; ++p) {
      StepTimings t;
      t.party = p;
      runs[0].push_back(t);
    }
    std::istringstream lines(golden);
    std::string line;
    std::getline(lines, line);
    std::vector<std::string> labels;
    for (int row = 0; std::getline(lines, line); ++row) {
      labels.push_back(line.substr(0, line.find_last_not_of(" 0123456789.", 27) + 1));
      double v0 = 0, v1 = 0;
      std::istringstream(line.substr(28)) >> v0 >> v1;
      double StepTimings::*field[] = {&StepTimings::local_gates_ms, &StepTimings::interactive_gate_ms,
                                      &StepTimings::layer_finish_ms, &StepTimings::communication_ms,
                                      &StepTimings::online_phase_ms};
      if (row < 5) {
        runs[0][0].*field[row] = v0;
        runs[0][1].*field[row] = v1;
      }
    }
    const auto want = row_labels(world);
    ck.expect(labels == std::vector<std::string>(want.begin(), want.end()),
              fmt::format("{} labels differ from the expected order", file));
    ck.expect(render_report(aggregate(runs, world), ReportFormat::kTable) == golden,
              fmt::format("{} render mismatch", file));
  }
  // A live run renders the same label column.
  const auto live = experiment({"--role", "loopback", "--app", "millionaire", "--size", "16", "--reps", "1",
                                "--clock", "virtual"});
  const std::string table = render_report(live.report, ReportFormat::kTable);
  std::size_t at = 0;
  for (const auto& l : row_labels(World::kBoolean)) {
    const auto pos = table.find("\n" + l + " ");
    ck.expect(pos != std::string::npos && pos >= at, "live table row " + l);
    at = pos;
  }
  return ck;
}

}  // namespace

int main() {
  bool all = true;
  const auto report = [&](int n, const char* name, const Check& ck, const std::string& note = "") {
    all = all && ck.ok;
    const std::string& extra = ck.ok ? note : ck.detail;
    fmt::print("criterion {}: {} {}{}\n", n, ck.ok ? "PASS" : "FAIL", name,
               extra.empty() ? "" : " (" + extra + ")");
    std::fflush(stdout);
  };
  const auto guarded = [&](int n, const char* name, const std::function<Check(std::string&)>& f) {
    std::string note;
    Check ck;
    try {
      ck = f(note);
    } catch (const std::exception& e) {
      ck.ok = false;
      ck.detail = std::string("exception: ") + e.what();
    }
    report(n, name, ck, note);
  };

  guarded(1, "correctness vs plaintext oracle", [](std::string& note) {
    Check ck = correctness();
    note = ck.detail;
    return ck;
  });
  guarded(2, "sharing invariants and triple identities", [](std::string&) { return sharing(); });
  guarded(3, "homogeneous balance", homogeneous_balance);
  guarded(4, "small-input communication dominance", communication_dominance);
  std::vector<SweepSet> sets;
  try {
    sets = heterogeneous_sweeps();
  } catch (const std::exception& e) {
    fmt::print("sweep failed: {}\n", e.what());
  }
  guarded(5, "heterogeneous skew", [&](std::string& note) {
    if (sets.size() != 2) return Check{false, "sweeps did not complete"};
    return heterogeneous_skew(sets, note);
  });
  guarded(6, "sensitivity trend", [&](std::string&) {
    if (sets.size() != 2) return Check{false, "sweeps did not complete"};
    return sensitivity(sets);
  });
  guarded(7, "protocol symmetry", [](std::string&) { return symmetry(); });
  guarded(8, "determinism and transcripts", [](std::string&) { return determinism(); });
  guarded(9, "report format", [](std::string&) { return report_format(); });
  return all ? 0 : 1;
}
