#include "hetmpc/clock.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "hetmpc/errors.hpp"

namespace hetmpc {

void ThrottleConfig::validate() const {
  if (!std::isfinite(factor) || factor < 1.0) {
    throw ConfigError(fmt::format("throttle factor {} must be >= 1", factor));
  }
}

double quantize_virtual_ms(double ms) {
  constexpr int kTickExponent = 32;
  return std::ldexp(std::nearbyint(std::ldexp(ms, kTickExponent)), -kTickExponent);
}

double virtual_exchange_stall(double sender_ready, double receiver_ready, double latency_ms) {
  return std::max(0.0, sender_ready + latency_ms - receiver_ready);
}

double virtual_barrier_release(double ready0, double ready1, double latency_ms) {
  return std::max(ready0, ready1) + latency_ms;
}

void busy_spin(std::chrono::nanoseconds duration) {
  if (duration <= std::chrono::nanoseconds::zero()) return;
  const auto deadline = std::chrono::steady_clock::now() + duration;
  volatile std::uint64_t sink = 0;
  while (std::chrono::steady_clock::now() < deadline) {
    for (int i = 0; i < 64; ++i) sink = sink * 6364136223846793005ULL + 1;
  }
}

double apply_throttle(double base_cost, const ThrottleConfig& cfg, ClockKind kind,
                      double unit_ms) {
  cfg.validate();
  if (kind == ClockKind::kVirtual) return base_cost * cfg.factor * unit_ms;
  const double extra_ms = base_cost * unit_ms * (cfg.factor - 1.0);
  if (extra_ms <= 0) return 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  busy_spin(std::chrono::nanoseconds(static_cast<std::int64_t>(extra_ms * 1e6)));
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

double VirtualBarrier::exchange(unsigned party, double ready) {
  const unsigned me = party == 0 ? 0 : 1;
  to_[1 - me].push(ready);
  double peer = 0;
  if (!to_[me].pop(peer)) throw ConnectionError("virtual clock barrier closed");
  return peer;
}

void VirtualBarrier::close() {
  to_[0].close();
  to_[1].close();
}

ClockMode ClockMode::virtual_clock(double latency_ms, CostTable costs) {
  ClockMode m;
  m.kind = ClockKind::kVirtual;
  m.latency_ms = latency_ms;
  m.costs = costs;
  m.barrier = std::make_shared<VirtualBarrier>();
  return m;
}

StepMeter::StepMeter(unsigned party, ClockMode mode, ThrottleConfig throttle)
    : party_(party), mode_(std::move(mode)), throttle_(throttle) {
  throttle_.validate();
  if (mode_.kind == ClockKind::kVirtual && !mode_.barrier) {
    throw ConfigError("virtual clock needs a shared barrier");
  }
  if (mode_.latency_ms < 0) throw ConfigError("latency must be non-negative");
  timings_.party = party_;
}

void StepMeter::start() {
  timings_ = StepTimings{};
  timings_.party = party_;
  virtual_now_ = 0;
  real_start_ = Clock::now();
}

void StepMeter::start_at(Clock::time_point t0) {
  start();
  real_start_ = t0;
}

void StepMeter::charge(Step step, double ms) {
  if (mode_.kind == ClockKind::kVirtual) ms = quantize_virtual_ms(ms);
  switch (step) {
    case Step::kLocal: timings_.local_gates_ms += ms; break;
    case Step::kInteractive: timings_.interactive_gate_ms += ms; break;
    case Step::kLayerFinish: timings_.layer_finish_ms += ms; break;
    case Step::kCommunication: timings_.communication_ms += ms; break;
  }
  virtual_now_ += ms;
}

void StepMeter::virtual_exchange() {
  const double peer_ready = mode_.barrier->exchange(party_, virtual_now_);
  const double latency = quantize_virtual_ms(mode_.latency_ms);
  const double release = party_ == 0 ? virtual_barrier_release(virtual_now_, peer_ready, latency)
                                     : virtual_barrier_release(peer_ready, virtual_now_, latency);
  charge(Step::kCommunication, release - virtual_now_);
}

StepTimings StepMeter::finish() {
  if (mode_.kind == ClockKind::kVirtual) {
    timings_.online_phase_ms = virtual_now_;
  } else {
    timings_.online_phase_ms = ms_since(real_start_);
  }
  return timings_;
}

}  // namespace hetmpc
