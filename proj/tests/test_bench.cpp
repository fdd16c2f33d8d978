#include <gtest/gtest.h>

#include <cstdio>
#include <sstream>
#include <thread>
#include <unistd.h>

#include "hetmpc/bench.hpp"
#include "hetmpc/errors.hpp"

namespace hetmpc {
namespace {

using Args = std::vector<std::string>;

TEST(ParseArgs, Defaults) {
  const RunConfig c = parse_args(Args{"--role", "loopback"});
  EXPECT_EQ(c.role, Role::kLoopback);
  EXPECT_EQ(c.app, AppId::kInnerProduct);
  EXPECT_EQ(c.size, 128u);
  EXPECT_EQ(c.bitlen, 16u);
  EXPECT_EQ(c.variant, MillionaireVariant::kTree);
  EXPECT_EQ(c.clock, ClockKind::kReal);
  EXPECT_EQ(c.reps, 10u);
  EXPECT_EQ(c.format, ReportFormat::kTable);
  EXPECT_TRUE(c.warnings.empty());
}

TEST(ParseArgs, UsageErrorsNameTheFlag) {
  const auto message = [](Args a) -> std::string {
    try {
      parse_args(a);
    } catch (const UsageError& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_NE(message({"--role", "0"}).find("--connect"), std::string::npos);
  EXPECT_NE(message({"--role", "1"}).find("--listen"), std::string::npos);
  EXPECT_NE(message({"--role", "loopback", "--throttle", "2"}).find("--throttle"), std::string::npos);
  EXPECT_NE(message({"--role", "1", "--listen", "9000", "--clock", "virtual"}).find("--clock"),
            std::string::npos);
  EXPECT_NE(message({"--role", "loopback", "--format", "xml"}).find("xml"), std::string::npos);
  EXPECT_NE(message({"--role", "loopback", "--sweep", "9:3"}).find("--sweep"), std::string::npos);
  EXPECT_FALSE(message({"--role", "loopback", "--bogus"}).empty());
}

TEST(ParseArgs, MillionaireBitLength) {
  const RunConfig tree = parse_args(Args{"--role", "loopback", "--app", "millionaire", "--bitlen", "32768"});
  EXPECT_EQ(tree.size, 32768u);
  EXPECT_TRUE(tree.warnings.empty());
  const RunConfig ripple = parse_args(
      Args{"--role", "loopback", "--app", "millionaire", "--bitlen", "32768", "--variant", "ripple"});
  ASSERT_EQ(ripple.warnings.size(), 1u);
  EXPECT_NE(ripple.warnings[0].find("32769"), std::string::npos);
  EXPECT_EQ(parse_args(Args{"--role", "loopback", "--app", "millionaire"}).size, 32u);
}

TEST(ParseArgs, TcpThrottleAndEndpoint) {
  const RunConfig c = parse_args(Args{"--role", "0", "--connect", "10.0.0.2:9000", "--throttle", "2.5"});
  EXPECT_EQ(c.connect_host, "10.0.0.2");
  EXPECT_EQ(c.connect_port, 9000);
  EXPECT_EQ(c.throttle[0], 2.5);
}

TEST(Experiment, LoopbackMatchesOracle) {
  RunConfig c = parse_args(Args{"--role", "loopback", "--size", "64", "--reps", "5", "--clock", "virtual"});
  const ExperimentResult r = run_experiment(c);
  EXPECT_TRUE(r.outputs_match);
  EXPECT_EQ(r.outputs, r.expected_outputs);
  EXPECT_EQ(r.report.repetitions, 5u);
  ASSERT_EQ(r.report.parties.size(), 2u);
  const std::string table = render_report(r.report, ReportFormat::kTable);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 6);
  EXPECT_EQ(r.round_count, 2u);
}

TEST(Experiment, SameInputsMillionaireIsZero) {
  const ExperimentResult r = run_experiment(
      parse_args(Args{"--role", "loopback", "--app", "millionaire", "--size", "32", "--same-inputs",
                      "--reps", "2", "--clock", "virtual"}));
  EXPECT_EQ(r.outputs, std::vector<u64>{0});
  EXPECT_TRUE(r.outputs_match);
}

TEST(Experiment, VirtualReportsAreDeterministic) {
  const Args a{"--role", "loopback", "--app", "millionaire", "--size", "64", "--clock", "virtual",
               "--throttle", "1,3", "--reps", "3", "--seed", "77"};
  const ExperimentResult x = run_experiment(parse_args(a));
  const ExperimentResult y = run_experiment(parse_args(a));
  EXPECT_EQ(x.report, y.report);
  EXPECT_EQ(x.transcripts, y.transcripts);
  EXPECT_EQ(x.report.parties[0].stddev.communication_ms, 0);
}

TEST(Sweep, RowsAndMonotoneFastParty) {
  std::ostringstream out;
  const auto rows = run_sweep(
      parse_args(Args{"--role", "loopback", "--sweep", "6:12", "--clock", "virtual", "--throttle", "1,3",
                      "--reps", "1"}),
      out);
  ASSERT_EQ(rows.size(), 7u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].size, rows[i - 1].size * 2);
    EXPECT_GE(rows[i].communication_ms[0], rows[i - 1].communication_ms[0]);
  }
  EXPECT_EQ(out.str().rfind(std::string(kSweepCsvHeader) + "\n64,", 0), 0u);
}

TEST(Sweep, SingleSizeAndZeroLatency) {
  std::ostringstream out;
  const auto rows = run_sweep(parse_args(Args{"--role", "loopback", "--sweep", "8:8", "--clock", "virtual",
                                              "--latency-ms", "0", "--reps", "1"}),
                              out);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].communication_ms[0], 0);
  EXPECT_EQ(rows[0].communication_ms[1], 0);
}

TEST(Tcp, TwoPartiesMatchLoopback) {
  const std::string port = std::to_string(20000 + getpid() % 20000);
  const Args common{"--app", "innerproduct", "--size", "100", "--reps", "3", "--seed", "5"};
  const auto with = [&](Args head) {
    head.insert(head.end(), common.begin(), common.end());
    return parse_args(head);
  };
  ExperimentResult r1;
  std::jthread server([&] { r1 = run_experiment(with({"--role", "1", "--listen", port})); });
  const ExperimentResult r0 = run_experiment(with({"--role", "0", "--connect", "127.0.0.1:" + port}));
  server.join();
  const ExperimentResult loop = run_experiment(with({"--role", "loopback"}));
  EXPECT_EQ(r0.outputs, loop.outputs);
  EXPECT_EQ(r1.outputs, loop.outputs);
  EXPECT_TRUE(r0.outputs_match);
  EXPECT_TRUE(r1.outputs_match);
  EXPECT_EQ(r0.transcripts[0], loop.transcripts[0]);
  EXPECT_EQ(r1.transcripts[1], loop.transcripts[1]);
}

TEST(Cli, ExitCodes) {
  std::ostringstream out, err;
  EXPECT_EQ(run_cli({"--role", "0"}, out, err), 2);
  EXPECT_NE(err.str().find("--connect"), std::string::npos);
  out.str("");
  EXPECT_EQ(run_cli({"--role", "loopback", "--size", "4", "--reps", "1", "--clock", "virtual"}, out, err), 0);
  EXPECT_NE(out.str().find("Online phase(ms)"), std::string::npos);
  EXPECT_NE(out.str().find("output: "), std::string::npos);
}

TEST(Cli, BinaryRuns) {
  const std::string cmd = std::string(HETMPC_CLI_PATH) +
                          " --role loopback --app millionaire --size 8 --reps 1 --format csv 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  std::string text;
  char buf[256];
  while (fgets(buf, sizeof buf, pipe)) text += buf;
  EXPECT_EQ(pclose(pipe), 0) << text;
  EXPECT_NE(text.find("party,local_gates_ms"), std::string::npos);
}

}  // namespace
}  // namespace hetmpc
