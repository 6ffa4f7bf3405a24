#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "annealbench/domain_wall.hpp"
#include "annealbench/ising.hpp"
#include "annealbench/rng.hpp"

namespace annealbench {

struct QuantumSegment {
    double duration_us = 1.0;
    double s_target = 1.0;
};

/// Piecewise-linear s(t) starting from s = 1.
struct QuantumSchedule {
    std::vector<QuantumSegment> segments;

    /// Durations positive, s in [0, 1], and every ramp lasting at least
    /// (1 - lower endpoint) microseconds.
    void validate() const;
    double total_us() const;
    double s_at(double t_us) const;
};

/// 1 -> s_hold, hold, s_hold -> 1. A ramp duration of 0 selects the fastest
/// allowed ramp, (1 - s_hold) microseconds.
QuantumSchedule reverse_anneal(double s_hold, double hold_us, double ramp_down_us = 0.0, double ramp_up_us = 0.0);

/// Reverse anneals tuned for the test potentials ("u1", "u2", "u3").
QuantumSchedule preset_quantum_schedule(const std::string& name);

/// Rows of "duration_us,s_target" (header optional).
QuantumSchedule load_quantum_csv(const std::string& path);

/// A(s), B(s) by linear interpolation in a table sorted by s.
class TransverseCurves {
public:
    /// A = 1 - s, B = s.
    TransverseCurves();
    explicit TransverseCurves(std::vector<std::array<double, 3>> rows);

    double a(double s) const;
    double b(double s) const;
    const std::vector<std::array<double, 3>>& rows() const { return rows_; }

private:
    double interp(double s, std::size_t col) const;
    std::vector<std::array<double, 3>> rows_;
};

/// Rows of "s,A,B" (header optional).
TransverseCurves load_curves_csv(const std::string& path);

struct SqaConfig {
    std::size_t slices = 32;
    double t_eff = 0.05;
    double sweeps_per_us = 10.0;
    std::size_t num_reads = 100;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Inter-slice ferromagnetic coupling -(T/2) ln tanh(A / (P T)); +infinity when A = 0.
double slice_coupling(double a, std::size_t slices, double t_eff);

/// (B/P) sum_k E(slice k) - J_perp sum_k sum_i s_i^k s_i^{k+1}, periodic in k.
double effective_energy(const IsingProblem& p, const std::vector<SpinState>& slices, double s,
                        const TransverseCurves& curves, const SqaConfig& config);

struct Read {
    SpinState state;
    double energy = 0.0;
    bool valid = true;  ///< decode validity when a layout is attached
    DecodedSample decoded;
};

struct ReadSet {
    std::vector<Read> reads;
    std::optional<DwLayout> layout;

    std::size_t valid_count() const;
};

/// Per-spin majority over slices; exact ties take rng.coin().
SpinState readout(const std::vector<SpinState>& slices, Rng& rng);

/// One read: all slices start at `init`, Metropolis at T_eff under the
/// Trotterised energy, one sweep of every (slice, spin) site per time step.
/// While A(s) = 0 the slices are locked together and each proposal flips a
/// spin in every slice at once.
SpinState sqa_single_read(const IsingProblem& p, const QuantumSchedule& schedule, const TransverseCurves& curves,
                          const SqaConfig& config, const SpinState& init, std::uint64_t seed,
                          std::vector<SpinState>* final_slices = nullptr);

/// config.num_reads reads with seeds derive_seed(config.seed, read index).
ReadSet sqa_run(const IsingProblem& p, const QuantumSchedule& schedule, const TransverseCurves& curves,
                const SqaConfig& config, const SpinState& init, const std::optional<DwLayout>& layout = std::nullopt);

class NoValidReads : public std::runtime_error {
public:
    NoValidReads() : std::runtime_error("no read decoded to a faithful domain-wall state") {}
};

/// Densest lattice cell among valid reads; ties go to the cell holding the
/// lowest-energy read, then to the lower (k_phi, k_psi).
DecodedSample mode_of_reads(const ReadSet& reads, const DwLayout& layout);

/// read_index,valid,phi,psi,energy
std::string reads_csv(const ReadSet& reads);

}  // namespace annealbench
