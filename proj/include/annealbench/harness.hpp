#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "annealbench/descent.hpp"
#include "annealbench/potentials.hpp"
#include "annealbench/sqa.hpp"
#include "annealbench/thermal.hpp"

namespace annealbench {

enum class Method { nm, gd, ta, qa };

std::string method_name(Method m);
Method parse_method(const std::string& name);
std::vector<Method> parse_methods(const std::string& list);

/// Everything needed to run any method on one potential.
struct MethodConfig {
    std::string potential = "u1";
    bool u2_literal_sign = false;
    double lambda_classical = 0.5;
    double lambda_quantum = 0.7;
    std::optional<Bounds> bounds;  ///< overrides the potential's default domain
    std::size_t n = 20;            ///< domain-wall block length for TA and QA
    EncodeMode encode_mode = EncodeMode::h_linear;
    NmParams nm;
    CgParams cg;
    ThermalSchedule thermal;
    QuantumSchedule quantum;
    TransverseCurves curves;
    SqaConfig sqa;
};

/// Reference settings for "u1", "u2", "u3" (lambdas, schedules); custom potentials
/// get lambda 1 and the u1 schedules.
MethodConfig preset_config(const std::string& potential);

nlohmann::json config_to_json(const MethodConfig& c);

/// Potential at the classical (NM, GD, TA) or quantum (QA) scale.
Potential make_potential(const MethodConfig& c, bool quantum);

/// Success when the result lies within 2 * max(xi, zeta) of the truth, with the
/// lattice steps of an n-spin block over the potential's bounds.
double success_threshold(const Bounds& b, std::size_t n);

struct RunRecord {
    std::string method;
    std::string potential;
    Point start;
    Point result;
    double delta = 0.0;
    double energy = 0.0;  ///< potential value at the result, at the method's scale
    bool valid = true;
    std::uint64_t seed = 0;
    double wall_time_us = 0.0;
};

/// Precomputed per-potential data shared by many runs.
class Solver {
public:
    explicit Solver(MethodConfig config);

    const MethodConfig& config() const { return config_; }
    const TruthRecord& truth() const { return truth_; }
    const Bounds& bounds() const { return classical_.bounds(); }
    const DwLayout& layout(bool quantum) const { return quantum ? q_layout_ : c_layout_; }
    const IsingProblem& problem(bool quantum) const { return quantum ? q_problem_ : c_problem_; }
    double threshold() const { return success_threshold(bounds(), config_.n); }

    /// Runs one method from one start. QA with no valid read yields an invalid
    /// record whose result is the start point.
    RunRecord run(Method m, Point start, std::uint64_t seed) const;
    /// Same as run() for QA but also returns the read set.
    RunRecord run_qa(Point start, std::uint64_t seed, ReadSet* reads) const;

private:
    RunRecord finish(Method m, Point start, Point result, bool valid, std::uint64_t seed, double us) const;

    MethodConfig config_;
    Potential classical_;
    Potential quantum_;
    TruthRecord truth_;
    DwLayout c_layout_;
    DwLayout q_layout_;
    IsingProblem c_problem_;
    IsingProblem q_problem_;
};

/// Cell-centred side x side lattice over the bounds, phi-major.
std::vector<Point> start_grid(const Bounds& b, std::size_t side);

/// Runs fn(0..count-1) on up to `threads` workers and rethrows the first error.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

/// Worker count from ANNEALBENCH_THREADS, else the hardware concurrency.
std::size_t default_threads();

/// One record per start; task i uses seed derive_seed(master_seed, i).
std::vector<RunRecord> basin_map(const Solver& solver, Method m, const std::vector<Point>& starts,
                                 std::uint64_t master_seed, std::size_t threads);

double success_fraction(const std::vector<RunRecord>& records, double threshold);
/// Fraction of valid records whose result lies within `radius` of `centre`.
double fraction_within(const std::vector<RunRecord>& records, Point centre, double radius);

std::string run_records_csv(const std::vector<RunRecord>& records);
std::vector<RunRecord> parse_run_records_csv(const std::string& text);

struct HistogramBin {
    double lo;
    double hi;
    std::size_t count;
};

struct StartDistribution {
    std::string method;
    Point start;
    std::vector<double> deltas;  ///< one per repetition
    std::size_t distinct = 0;
};

/// reps runs per start; deterministic methods run once and the value is
/// repeated. Seeds: derive_seed(master_seed, start_index * reps + rep).
std::vector<StartDistribution> distance_histograms(const Solver& solver, Method m, const std::vector<Point>& starts,
                                                   std::size_t reps, std::uint64_t master_seed,
                                                   std::size_t threads);

std::vector<HistogramBin> histogram(const std::vector<double>& values, double lo, double hi, std::size_t bins);

/// method,start_index,phi_start,psi_start,bin_lo,bin_hi,count
std::string histograms_csv(const std::vector<StartDistribution>& dists, double hi, std::size_t bins);

enum class SweepStart { random, ordered, ladder };

SweepStart parse_sweep_start(const std::string& name);
std::string sweep_start_name(SweepStart s);

struct ThermalProtocol {
    std::size_t equilibrate = 100;
    std::size_t measure = 100;
    std::size_t repetitions = 10;
    /// random: one shared random state for every run. ordered: all spins up.
    /// ladder: temperatures visited from high to low, each run carrying its
    /// state from the previous temperature (first from the shared random state).
    SweepStart start = SweepStart::random;
};

struct SweepResult {
    std::string axis;
    std::vector<double> values;
    std::vector<std::vector<double>> eta;  ///< raw samples per value
    std::vector<std::vector<double>> m;
    std::vector<double> eta_mean, eta_std, m_mean, m_std;
    std::vector<std::size_t> count;

    /// Fills means and sample standard deviations from the raw samples.
    void aggregate();
};

/// Samples are per-run averages over the measurement sweeps.
SweepResult ising_thermal_sweep(std::size_t n, double lambda, const std::vector<double>& temperatures,
                                const ThermalProtocol& protocol, std::uint64_t seed, std::size_t threads);

struct QuantumSweepOptions {
    double s_hold = 0.3;
    double hold_us = 100.0;
    std::size_t reads = 20;
    SweepStart start = SweepStart::random;
    TransverseCurves curves;
    SqaConfig sqa;
};

/// One sample per read: eta and M of the readout after a reverse anneal.
SweepResult ising_lambda_sweep(std::size_t n, const std::vector<double>& lambdas, const QuantumSweepOptions& opt,
                               std::uint64_t seed, std::size_t threads);

/// axis_value,eta_mean,eta_std,m_mean,m_std,count
std::string sweep_csv(const SweepResult& r);

struct StudyRow {
    double parameter;
    Method method;
    double success;
    std::size_t runs;
};

/// QA success fraction on the configured potential at each quantum lambda.
std::vector<StudyRow> lambda_scaling_study(const MethodConfig& base, const std::vector<double>& lambdas,
                                           const std::vector<Point>& starts, std::uint64_t seed,
                                           std::size_t threads);

/// Success fraction per block length n for each method.
std::vector<StudyRow> grid_size_study(const MethodConfig& base, const std::vector<std::size_t>& n_values,
                                      const std::vector<Method>& methods, const std::vector<Point>& starts,
                                      std::uint64_t seed, std::size_t threads);

struct TimingRow {
    Method method;
    double mean_us;
    double std_us;
    std::size_t reps;
    double reference_us;
};

double reference_timing_us(Method m);

/// Sequential timing of reps runs per method over cycling starts.
std::vector<TimingRow> timing_table(const Solver& solver, const std::vector<Method>& methods, std::size_t reps,
                                    std::uint64_t seed);

std::string timing_csv(const std::vector<TimingRow>& rows);

/// Heatmap of delta over a side x side start grid.
std::string basin_svg(const std::vector<RunRecord>& records, std::size_t side, const std::string& title);
/// M (and eta) against the sweep axis.
std::string sweep_svg(const SweepResult& r, const std::string& title);

}  // namespace annealbench
