#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "annealbench/ising.hpp"
#include "annealbench/rng.hpp"

namespace annealbench {

struct ThermalSegment {
    std::size_t iterations = 1;
    double temperature = 0.0;
};

/// Piecewise-constant temperature, one Metropolis sweep per iteration.
struct ThermalSchedule {
    std::vector<ThermalSegment> segments;
    std::string name;

    std::size_t total_iterations() const;
    void validate() const;
};

struct ThermalResult {
    SpinState state;
    double energy = 0.0;
    std::vector<double> energy_trace;      ///< energy after every iteration
    std::vector<double> acceptance_trace;  ///< accepted fraction per iteration
    std::uint64_t seed = 0;
};

/// min(1, exp(-dE/T)); at T = 0 only non-positive dE is accepted.
double metropolis_acceptance(double delta_e, double temperature);

/// Proposes every spin once in a fresh Fisher-Yates order. Returns the number
/// of accepted flips and adds the accepted energy change to `energy`.
std::size_t metropolis_sweep(const IsingProblem& p, SpinState& s, double temperature, Rng& rng,
                             std::vector<std::size_t>& order, double& energy);

ThermalResult run_thermal(const IsingProblem& p, const ThermalSchedule& schedule, const SpinState& init,
                          std::uint64_t seed);

/// constant, sharp, medium, slow, u1-paper, u3-paper. `decay` is the factor
/// applied every 500 iterations in the u1/u3 presets; t0 the start temperature.
ThermalSchedule preset_schedule(const std::string& name, double decay = 0.05, double t0 = 1.1);

/// Rows of "iterations,temperature" (header optional).
ThermalSchedule load_thermal_csv(const std::string& path);

}  // namespace annealbench
