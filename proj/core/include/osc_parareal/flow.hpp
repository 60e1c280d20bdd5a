#pragma once

#include <cstdint>

#include "osc_parareal/state.hpp"

namespace osc {

// Micro-step tally. Each task owns one; merged after a parallel phase.
struct StepCounter {
  std::uint64_t steps = 0;
  void add(std::uint64_t n) { steps += n; }
};

class FlowMap {
 public:
  virtual ~FlowMap() = default;
  // dt may be negative. Identical inputs give bitwise-identical outputs.
  virtual State propagate(const State& u, double t0, double dt, StepCounter* cost = nullptr) const = 0;
};

}  // namespace osc
