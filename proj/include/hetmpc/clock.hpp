#pragma once

// Clocks and compute throttling for online-phase profiling.
//
// Real mode reads a monotonic clock around each step. Virtual mode never
// reads a clock: each step advances a per-party virtual time by a fixed cost
// per gate, scaled by the party's throttle factor, and every exchange is a
// barrier that releases both parties at max(ready) + latency. Virtual runs
// are therefore fully deterministic regardless of thread scheduling.

#include <chrono>
#include <cstdint>
#include <memory>

#include "hetmpc/ring.hpp"
#include "hetmpc/transport.hpp"

namespace hetmpc {

// Per-party time attribution over one online execution, in milliseconds.
struct StepTimings {
  double local_gates_ms = 0;
  double interactive_gate_ms = 0;
  double layer_finish_ms = 0;
  double communication_ms = 0;
  double online_phase_ms = 0;
  unsigned party = 0;

  double component_sum() const {
    return local_gates_ms + interactive_gate_ms + layer_finish_ms + communication_ms;
  }
  friend bool operator==(const StepTimings&, const StepTimings&) = default;
};

enum class Step { kLocal, kInteractive, kLayerFinish, kCommunication };

// Virtual cost units per gate kind, and the wall-time value of one unit.
struct CostTable {
  double local_arith_gate = 1.0;
  double local_bool_word = 0.25;  // per 64 local Boolean gates
  double interactive_prepare = 2.0;
  double layer_finish = 3.0;
  double unit_ms = 0.001;
};

struct ThrottleConfig {
  double factor = 1.0;  // compute slowdown; 1.0 is native speed

  // Throws ConfigError for factor < 1 or non-finite.
  void validate() const;
};

enum class ClockKind : std::uint8_t { kReal, kVirtual };

// Virtual time is kept on a 2^-32 ms grid (exact up to ~35 minutes) so that sums of step times are
// exact in double precision and independent of accumulation order.
double quantize_virtual_ms(double ms);

// Pure: how long the receiver blocks for a frame sent at sender_ready that
// takes latency_ms to arrive.
double virtual_exchange_stall(double sender_ready, double receiver_ready, double latency_ms);
// Time both parties leave an exchange: the layer closes only once both
// frames have crossed the link.
double virtual_barrier_release(double ready0, double ready1, double latency_ms);

// Spins (never sleeps) so throttled time stays CPU-bound.
void busy_spin(std::chrono::nanoseconds duration);

// Virtual: returns base_cost * factor * unit_ms and spins nothing.
// Real: base_cost * unit_ms is the native time of work already done; spins
// for (factor - 1) times that and returns the extra time actually spent.
double apply_throttle(double base_cost, const ThrottleConfig& cfg, ClockKind kind,
                      double unit_ms);

// Rendezvous of the two parties' virtual ready times, one per exchange.
class VirtualBarrier {
 public:
  // Publishes own ready time and blocks for the peer's matching one.
  double exchange(unsigned party, double ready);
  void close();

 private:
  BlockingQueue<double> to_[2];
};

struct ClockMode {
  ClockKind kind = ClockKind::kReal;
  double latency_ms = 0.1;
  CostTable costs;
  // Shared by both parties of a virtual loopback run.
  std::shared_ptr<VirtualBarrier> barrier;

  static ClockMode real() { return {}; }
  static ClockMode virtual_clock(double latency_ms, CostTable costs = {});
};

// Accumulates StepTimings for one party across all layers of one execution.
class StepMeter {
 public:
  StepMeter(unsigned party, ClockMode mode, ThrottleConfig throttle);

  void start();
  // Real mode: measure online time from `t0` instead of now.
  void start_at(std::chrono::steady_clock::time_point t0);

  // Runs `work` as one compute step. `cost_units` is what the step costs in
  // virtual mode; real mode measures it and applies the throttle spin.
  template <typename F>
  void compute(Step step, double cost_units, F&& work) {
    if (mode_.kind == ClockKind::kVirtual) {
      work();
      charge(step, apply_throttle(cost_units, throttle_, ClockKind::kVirtual, mode_.costs.unit_ms));
      return;
    }
    const auto t0 = Clock::now();
    work();
    const double native = ms_since(t0);
    apply_throttle(native, throttle_, ClockKind::kReal, 1.0);
    charge(step, ms_since(t0));
  }

  // Runs the blocking receive `wait`; its duration is communication time.
  template <typename F>
  auto exchange(F&& wait) {
    if (mode_.kind == ClockKind::kVirtual) {
      auto result = wait();
      virtual_exchange();
      return result;
    }
    const auto t0 = Clock::now();
    auto result = wait();
    charge(Step::kCommunication, ms_since(t0));
    return result;
  }

  StepTimings finish();
  const StepTimings& current() const { return timings_; }
  double virtual_now() const { return virtual_now_; }

 private:
  using Clock = std::chrono::steady_clock;
  static double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  }
  void charge(Step step, double ms);
  void virtual_exchange();

  unsigned party_;
  ClockMode mode_;
  ThrottleConfig throttle_;
  StepTimings timings_;
  Clock::time_point real_start_{};
  double virtual_now_ = 0;
};

}  // namespace hetmpc
