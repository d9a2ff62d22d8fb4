#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "event_data.hpp"
#include "intensity.hpp"

namespace repsys {

// Counter-based uniform stream: the k-th draw of stream `stream` under seed
// `seed` is a pure function of (seed, stream, k), so parallel simulation is
// schedule-independent.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);
    double uniform();                 // next draw in [0, 1)
    double uniform_open();            // draw in (0, 1)
    std::uint64_t draws() const { return counter_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

struct SimulationPlan {
    ModelSpec spec;
    int system_count = 1;
    std::vector<double> censor_times; // one entry, or one per system
    std::uint64_t seed = 0;
    std::optional<std::vector<double>> covariates; // shared Z applied to every system

    double tau_for(int i) const;
};

EventDataset simulate(const SimulationPlan& plan);

// Single-system simulation on stream `system_index` (used by resampling and
// replicate studies that need independent streams under one seed).
SystemHistory simulate_system(const ModelSpec& spec, double tau, std::uint64_t seed,
                              std::uint64_t system_index,
                              const std::optional<std::vector<double>>& covariates = {});

} // namespace repsys
