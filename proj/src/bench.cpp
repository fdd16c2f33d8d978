#include "hetmpc/bench.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "hetmpc/errors.hpp"
#include "hetmpc/preprocessing.hpp"
#include "hetmpc/session.hpp"
#include "hetmpc/sharing.hpp"
#include "hetmpc/simd/kernels.hpp"

namespace hetmpc {
namespace {

// Above this many rounds a ripple comparison is impractical over real links.
constexpr std::size_t kRippleRoundWarning = 1024;

std::array<double, 2> parse_throttle(const std::string& text, Role role) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(fmt::format("--throttle: '{}' is not a number", item));
    }
  }
  for (double f : values) {
    if (!std::isfinite(f) || f < 1.0) throw UsageError(fmt::format("--throttle: factor {} must be >= 1", f));
  }
  if (role == Role::kLoopback) {
    if (values.size() != 2) throw UsageError("--throttle needs F0,F1 in loopback mode");
    return {values[0], values[1]};
  }
  if (values.size() != 1) throw UsageError("--throttle takes a single factor F for a TCP role");
  const unsigned me = role == Role::kParty0 ? 0 : 1;
  std::array<double, 2> out{1.0, 1.0};
  out[me] = values[0];
  return out;
}

std::pair<unsigned, unsigned> parse_sweep(const std::string& text) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument(text);
    const unsigned long lo = std::stoul(text.substr(0, colon));
    const unsigned long hi = std::stoul(text.substr(colon + 1));
    if (lo > hi || hi > 30) throw std::out_of_range(text);
    return {static_cast<unsigned>(lo), static_cast<unsigned>(hi)};
  } catch (const std::exception&) {
    throw UsageError(fmt::format("--sweep expects LO:HI exponents with LO <= HI <= 30, got '{}'", text));
  }
}

}  // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
  CLI::App app{"Two-party secret-sharing online-phase benchmark", "mpcbench"};
  std::string role, app_name = "innerproduct", variant = "tree", connect, throttle, clock = "real",
                    format = "table", sweep;
  std::optional<std::uint64_t> size;
  std::optional<unsigned> bitlen;
  std::optional<unsigned> listen;
  std::optional<double> latency;
  std::size_t reps = 10;
  std::uint64_t seed = 1;
  bool time_input_sharing = false, same_inputs = false;
  std::string dump_path, triples_path;

  app.add_option("--role", role, "0, 1 or loopback")->required();
  app.add_option("--app", app_name, "innerproduct or millionaire");
  app.add_option("--size", size, "vector length (innerproduct) or input bits (millionaire)");
  app.add_option("--bitlen", bitlen, "ring bit length (innerproduct) or input bits (millionaire)");
  app.add_option("--variant", variant, "millionaire circuit: ripple or tree");
  app.add_option("--connect", connect, "HOST:PORT of party 1 (role 0)");
  app.add_option("--listen", listen, "port to accept party 0 on (role 1)");
  app.add_option("--throttle", throttle, "compute slowdown F, or F0,F1 in loopback");
  app.add_option("--clock", clock, "real or virtual");
  app.add_option("--latency-ms", latency, "link latency of the virtual clock");
  app.add_option("--reps", reps, "online executions to average");
  app.add_option("--seed", seed, "root seed for inputs, masks and triples");
  app.add_option("--format", format, "table, csv or json");
  app.add_option("--sweep", sweep, "LO:HI, sizes 2^LO..2^HI");
  app.add_flag("--time-input-sharing", time_input_sharing, "count input distribution as online time");
  app.add_flag("--same-inputs", same_inputs, "give both parties the same private inputs");
  app.add_option("--dump-circuit", dump_path, "write the circuit in text form");
  app.add_option("--triples", triples_path, "triple pool file (TCP) or output prefix (loopback)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig cfg;
  if (role == "0") {
    cfg.role = Role::kParty0;
  } else if (role == "1") {
    cfg.role = Role::kParty1;
  } else if (role == "loopback") {
    cfg.role = Role::kLoopback;
  } else {
    throw UsageError(fmt::format("--role must be 0, 1 or loopback, got '{}'", role));
  }

  if (app_name == "innerproduct") {
    cfg.app = AppId::kInnerProduct;
    cfg.size = size.value_or(128);
    cfg.bitlen = bitlen.value_or(RingSpec::kDefaultBits);
    if (cfg.bitlen < 1 || cfg.bitlen > 64) throw UsageError("--bitlen must be in [1, 64] for innerproduct");
  } else if (app_name == "millionaire") {
    cfg.app = AppId::kMillionaire;
    if (size && bitlen && *size != *bitlen) {
      throw UsageError("--size and --bitlen disagree; millionaire takes one input bit length");
    }
    cfg.size = bitlen ? *bitlen : size.value_or(32);
    cfg.bitlen = 1;
  } else {
    throw UsageError(fmt::format("--app must be innerproduct or millionaire, got '{}'", app_name));
  }
  if (cfg.size == 0) throw UsageError("--size must be at least 1");

  try {
    cfg.variant = parse_variant(variant);
  } catch (const DomainError&) {
    throw UsageError(fmt::format("--variant must be ripple or tree, got '{}'", variant));
  }

  switch (cfg.role) {
    case Role::kParty0:
      if (connect.empty()) throw UsageError("--role 0 requires --connect HOST:PORT");
      if (listen) throw UsageError("--listen conflicts with --role 0 (party 1 listens)");
      std::tie(cfg.connect_host, cfg.connect_port) = parse_endpoint(connect);
      break;
    case Role::kParty1:
      if (!listen) throw UsageError("--role 1 requires --listen PORT");
      if (!connect.empty()) throw UsageError("--connect conflicts with --role 1 (party 0 connects)");
      if (*listen == 0 || *listen > 65535) throw UsageError("--listen port out of range");
      cfg.listen_port = static_cast<std::uint16_t>(*listen);
      break;
    case Role::kLoopback:
      if (!connect.empty()) throw UsageError("--connect conflicts with --role loopback");
      if (listen) throw UsageError("--listen conflicts with --role loopback");
      break;
  }

  if (!throttle.empty()) cfg.throttle = parse_throttle(throttle, cfg.role);

  if (clock == "real") {
    cfg.clock = ClockKind::kReal;
  } else if (clock == "virtual") {
    cfg.clock = ClockKind::kVirtual;
    if (cfg.role != Role::kLoopback) throw UsageError("--clock virtual requires --role loopback");
  } else {
    throw UsageError(fmt::format("--clock must be real or virtual, got '{}'", clock));
  }
  if (latency) {
    if (!std::isfinite(*latency) || *latency < 0) throw UsageError("--latency-ms must be >= 0");
    cfg.latency_ms = *latency;
    if (cfg.clock != ClockKind::kVirtual) cfg.warnings.push_back("--latency-ms only affects --clock virtual");
  }

  if (reps < 1) throw UsageError("--reps must be at least 1");
  cfg.reps = reps;
  cfg.seed = seed;
  cfg.format = parse_format(format);
  if (!sweep.empty()) {
    if (cfg.role != Role::kLoopback) throw UsageError("--sweep requires --role loopback");
    cfg.sweep = parse_sweep(sweep);
  }
  cfg.time_input_sharing = time_input_sharing;
  cfg.same_inputs = same_inputs;
  cfg.dump_circuit_path = dump_path;
  cfg.triples_path = triples_path;

  if (cfg.app == AppId::kMillionaire && cfg.variant == MillionaireVariant::kRipple) {
    const std::uint64_t largest = cfg.sweep ? (std::uint64_t{1} << cfg.sweep->second) : cfg.size;
    if (largest + 1 > kRippleRoundWarning) {
      cfg.warnings.push_back(fmt::format(
          "ripple variant with {} input bits runs {} sequential rounds; consider --variant tree",
          largest, largest + 1));
    }
  }
  return cfg;
}

RunConfig parse_args(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return parse_args(args);
}

Circuit build_circuit(const RunConfig& cfg) {
  if (cfg.app == AppId::kInnerProduct) return build_inner_product(cfg.size, RingSpec(cfg.bitlen));
  return build_millionaire(cfg.size, cfg.variant);
}

HelloParams hello_for(const RunConfig& cfg) {
  HelloParams h;
  h.app = cfg.app;
  h.world = cfg.app == AppId::kInnerProduct ? World::kArithmetic : World::kBoolean;
  h.bit_length = static_cast<std::uint16_t>(cfg.bitlen);
  h.size = cfg.size;
  h.variant = cfg.app == AppId::kMillionaire ? cfg.variant : MillionaireVariant::kRipple;
  h.seed_commitment = hash64(cfg.seed, "commit", 0);
  return h;
}

std::vector<u64> generate_inputs(const RunConfig& cfg, const Circuit& c, unsigned party) {
  SeededRng rng(cfg.seed, "inputs", cfg.same_inputs ? 0 : party);
  const std::size_t n = c.input_map[party].size();
  if (c.world == World::kBoolean) return unpack_bits(random_bits(n, rng));
  std::vector<u64> v(n);
  for (auto& x : v) x = rng.next_bits(c.ring.bit_length());
  return v;
}

namespace {

std::string app_name(AppId app) { return app == AppId::kInnerProduct ? "innerproduct" : "millionaire"; }

ReportMeta meta_for(const RunConfig& cfg, std::span<const u64> outputs) {
  ReportMeta m;
  m.emplace_back("app", app_name(cfg.app));
  m.emplace_back("size", static_cast<std::int64_t>(cfg.size));
  m.emplace_back("l", static_cast<std::int64_t>(cfg.bitlen));
  if (cfg.app == AppId::kMillionaire) m.emplace_back("variant", std::string(variant_name(cfg.variant)));
  m.emplace_back("role", cfg.role == Role::kLoopback ? std::string("loopback")
                                                     : fmt::format("{}", cfg.role == Role::kParty0 ? 0 : 1));
  m.emplace_back("throttle0", cfg.throttle[0]);
  m.emplace_back("throttle1", cfg.throttle[1]);
  m.emplace_back("clock", std::string(cfg.clock == ClockKind::kReal ? "real" : "virtual"));
  if (cfg.clock == ClockKind::kVirtual) m.emplace_back("latency_ms", cfg.latency_ms);
  m.emplace_back("seed", static_cast<std::int64_t>(cfg.seed));
  m.emplace_back("kernels", std::string(simd::active_kernels().name));
  m.emplace_back("outputs", fmt::format("{}", fmt::join(outputs, " ")));
  return m;
}

std::uint64_t rep_seed(const RunConfig& cfg, std::size_t rep) { return hash64(cfg.seed, "rep", rep); }

ClockMode clock_for(const RunConfig& cfg) {
  return cfg.clock == ClockKind::kVirtual ? ClockMode::virtual_clock(cfg.latency_ms) : ClockMode::real();
}

ExperimentResult run_loopback_experiment(const RunConfig& cfg, const Circuit& c, const LayerPlan& plan) {
  ExperimentResult res;
  res.round_count = plan.round_count;
  const std::array<std::vector<u64>, 2> inputs{generate_inputs(cfg, c, 0), generate_inputs(cfg, c, 1)};
  res.expected_outputs = eval_plaintext(c, inputs[0], inputs[1]);

  // With --triples the whole run draws from one pool pair, also written to disk.
  std::array<TripleStore, 2> shared_pools;
  const bool from_file = !cfg.triples_path.empty();
  if (from_file) {
    auto [p0, p1] = deal_for(c, cfg.reps, hash64(cfg.seed, "pool", 0));
    write_store(cfg.triples_path + ".p0", c.world, p0);
    write_store(cfg.triples_path + ".p1", c.world, p1);
    shared_pools = {std::move(p0), std::move(p1)};
  }

  std::vector<std::vector<StepTimings>> runs;
  for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
    LoopbackSetup setup;
    setup.circuit = &c;
    setup.plan = &plan;
    setup.hello = hello_for(cfg);
    const std::uint64_t seed = rep_seed(cfg, rep);
    if (from_file) {
      setup.pools = std::move(shared_pools);
    } else {
      auto [p0, p1] = deal_for(c, 1, seed);
      setup.pools = {std::move(p0), std::move(p1)};
    }
    setup.inputs = inputs;
    setup.mask_seeds = {hash64(seed, "input-masks", 0), hash64(seed, "input-masks", 1)};
    setup.clock = clock_for(cfg);
    setup.throttle = {ThrottleConfig{cfg.throttle[0]}, ThrottleConfig{cfg.throttle[1]}};
    setup.options.time_input_sharing = cfg.time_input_sharing;

    LoopbackResult r = run_loopback(std::move(setup));
    if (from_file) shared_pools = std::move(r.pools_after);
    res.outputs_match = res.outputs_match && r.outputs_agree && r.party[0].outputs == res.expected_outputs;
    res.outputs = r.party[0].outputs;
    for (unsigned p = 0; p < 2; ++p) {
      res.transcripts[p].insert(res.transcripts[p].end(), r.transcript[p].begin(), r.transcript[p].end());
    }
    runs.push_back({r.party[0].timings, r.party[1].timings});
  }
  res.report = aggregate(runs, c.world, meta_for(cfg, res.outputs));
  return res;
}

ExperimentResult run_tcp_experiment(const RunConfig& cfg, const Circuit& c, const LayerPlan& plan) {
  ExperimentResult res;
  res.round_count = plan.round_count;
  const unsigned me = cfg.role == Role::kParty0 ? 0 : 1;
  const std::vector<u64> inputs = generate_inputs(cfg, c, me);

  std::unique_ptr<TcpTransport> tcp = me == 0 ? TcpTransport::connect(cfg.connect_host, cfg.connect_port)
                                              : TcpTransport::listen(*cfg.listen_port);
  RecordingTransport transport(*tcp);

  TripleStore pool;
  const bool from_file = !cfg.triples_path.empty();
  if (from_file) pool = read_store(cfg.triples_path);

  std::vector<std::vector<StepTimings>> runs;
  for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
    const std::uint64_t seed = rep_seed(cfg, rep);
    TripleStore mine;
    if (from_file) {
      mine = std::move(pool);
    } else {
      // Both hosts run the same deterministic dealer and keep their own half.
      auto dealt = deal_for(c, 1, seed);
      mine = me == 0 ? std::move(dealt.first) : std::move(dealt.second);
    }
    Session s(PartyId(me), transport, c, plan, std::move(mine), ClockMode::real(),
              ThrottleConfig{cfg.throttle[me]});
    s.handshake(hello_for(cfg));
    SeededRng masks(hash64(seed, "input-masks", me));
    OnlineOptions opts;
    opts.time_input_sharing = cfg.time_input_sharing;
    OnlineResult r = s.run_online(inputs, masks, opts);
    res.outputs_match = s.confirm_outputs(r.outputs) && res.outputs_match;
    res.outputs = r.outputs;
    if (from_file) pool = s.release_pools();
    runs.push_back({r.timings});
  }
  res.transcripts[me] = transport.transcript();
  tcp->close();
  res.report = aggregate(runs, c.world, meta_for(cfg, res.outputs));
  return res;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& cfg) {
  const Circuit c = build_circuit(cfg);
  const LayerPlan plan = assign_layers(c);
  if (!cfg.dump_circuit_path.empty()) {
    std::ofstream out(cfg.dump_circuit_path);
    if (!out) throw ConfigError(fmt::format("cannot write '{}'", cfg.dump_circuit_path));
    out << dump_circuit(c);
  }
  if (cfg.role == Role::kLoopback) return run_loopback_experiment(cfg, c, plan);
  return run_tcp_experiment(cfg, c, plan);
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.sweep) throw UsageError("run_sweep needs --sweep LO:HI");
  if (cfg.role != Role::kLoopback) throw UsageError("--sweep requires --role loopback");
  std::vector<SweepRow> rows;
  out << kSweepCsvHeader << '\n';
  for (unsigned k = cfg.sweep->first; k <= cfg.sweep->second; ++k) {
    RunConfig one = cfg;
    one.sweep.reset();
    one.size = std::uint64_t{1} << k;
    one.dump_circuit_path.clear();
    try {
      const ExperimentResult r = run_experiment(one);
      if (!r.outputs_match) throw ProtocolError(fmt::format("outputs disagree at size {}", one.size));
      SweepRow row;
      row.size = one.size;
      for (const auto& p : r.report.parties) {
        row.communication_ms[p.party] = p.mean.communication_ms;
        row.online_ms[p.party] = p.mean.online_phase_ms;
      }
      out << render_sweep_row(row) << std::flush;
      rows.push_back(row);
    } catch (const std::exception& e) {
      out << "# partial: " << e.what() << '\n' << std::flush;
      throw;
    }
  }
  return rows;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_args(args);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }
  for (const auto& w : cfg.warnings) err << "warning: " << w << '\n';
  try {
    if (cfg.sweep) {
      run_sweep(cfg, out);
      return 0;
    }
    const ExperimentResult r = run_experiment(cfg);
    out << render_report(r.report, cfg.format);
    if (cfg.format == ReportFormat::kTable) out << fmt::format("output: {}\n", fmt::join(r.outputs, " "));
    if (!r.outputs_match) {
      err << "error: outputs did not match between parties or against the plaintext oracle\n";
      return 1;
    }
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace hetmpc
