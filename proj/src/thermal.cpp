#include "annealbench/thermal.hpp"

#include <cmath>
#include <fstream>

#include "annealbench/csv.hpp"

namespace annealbench {

std::size_t ThermalSchedule::total_iterations() const {
    std::size_t n = 0;
    for (const auto& s : segments) {
        n += s.iterations;
    }
    return n;
}

void ThermalSchedule::validate() const {
    if (segments.empty()) {
        throw InvalidArgument("thermal schedule has no segments");
    }
    for (const auto& s : segments) {
        if (s.iterations == 0) {
            throw InvalidArgument("thermal schedule segment with zero iterations");
        }
        if (!std::isfinite(s.temperature) || s.temperature < 0.0) {
            throw InvalidArgument("thermal schedule temperature must be finite and >= 0");
        }
    }
}

double metropolis_acceptance(double delta_e, double temperature) {
    if (delta_e <= 0.0) {
        return 1.0;
    }
    if (temperature <= 0.0) {
        return 0.0;
    }
    return std::exp(-delta_e / temperature);
}

std::size_t metropolis_sweep(const IsingProblem& p, SpinState& s, double temperature, Rng& rng,
                             std::vector<std::size_t>& order, double& energy) {
    const std::size_t n = p.size();
    order.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[rng.below(i)]);
    }
    std::size_t accepted = 0;
    for (std::size_t i : order) {
        const double de = delta_energy(p, s, i);
        bool take = de <= 0.0;
        if (!take && temperature > 0.0) {
            take = rng.uniform() < std::exp(-de / temperature);
        }
        if (take) {
            s.flip(i);
            energy += de;
            ++accepted;
        }
    }
    return accepted;
}

ThermalResult run_thermal(const IsingProblem& p, const ThermalSchedule& schedule, const SpinState& init,
                          std::uint64_t seed) {
    schedule.validate();
    if (init.size() != p.size()) {
        throw InvalidArgument("initial state has " + std::to_string(init.size()) + " spins, problem has " +
                              std::to_string(p.size()));
    }
    ThermalResult r;
    r.seed = seed;
    r.state = init;
    const std::size_t total = schedule.total_iterations();
    r.energy_trace.reserve(total);
    r.acceptance_trace.reserve(total);
    Rng rng(seed);
    std::vector<std::size_t> order;
    double e = energy(p, r.state);
    const double n = p.size() == 0 ? 1.0 : static_cast<double>(p.size());
    for (const auto& seg : schedule.segments) {
        for (std::size_t it = 0; it < seg.iterations; ++it) {
            const auto acc = metropolis_sweep(p, r.state, seg.temperature, rng, order, e);
            r.energy_trace.push_back(e);
            r.acceptance_trace.push_back(static_cast<double>(acc) / n);
        }
    }
    r.energy = energy(p, r.state);
    return r;
}

namespace {

void append(ThermalSchedule& s, std::size_t iterations, double t) {
    if (!s.segments.empty() && s.segments.back().temperature == t) {
        s.segments.back().iterations += iterations;
    } else {
        s.segments.push_back({iterations, t});
    }
}

ThermalSchedule halving_then_decay(const std::string& name, std::size_t hold, double decay, double t0) {
    constexpr std::size_t total = 4000;
    constexpr std::size_t block = 500;
    ThermalSchedule s;
    s.name = name;
    append(s, hold, t0);
    double t = 0.5 * t0;
    append(s, block, t);
    for (std::size_t done = hold + block; done < total; done += block) {
        t *= decay;
        append(s, block, t);
    }
    return s;
}

}  // namespace

ThermalSchedule preset_schedule(const std::string& name, double decay, double t0) {
    if (!(decay > 0.0) || !(decay <= 1.0) || !(t0 >= 0.0) || !std::isfinite(t0)) {
        throw InvalidArgument("preset needs decay in (0, 1] and finite t0 >= 0");
    }
    if (name == "u1-paper") {
        return halving_then_decay(name, 500, decay, t0);
    }
    if (name == "u3-paper") {
        return halving_then_decay(name, 1000, decay, t0);
    }
    double rate = 0.0;
    if (name == "constant") {
        rate = 1.0;
    } else if (name == "sharp") {
        rate = 0.05;
    } else if (name == "medium") {
        rate = 0.3;
    } else if (name == "slow") {
        rate = 0.7;
    } else {
        throw InvalidArgument("unknown schedule preset '" + name +
                              "' (constant, sharp, medium, slow, u1-paper, u3-paper)");
    }
    ThermalSchedule s;
    s.name = name;
    for (std::size_t t = 0; t < 4000; ++t) {
        append(s, 1, t0 * std::pow(rate, static_cast<double>(t) / 500.0));
    }
    return s;
}

ThermalSchedule load_thermal_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("cannot open schedule CSV '" + path + "'");
    }
    ThermalSchedule s;
    s.name = path;
    for (const auto& row : read_numeric_rows(in, {"iterations", "temperature"})) {
        if (row.size() != 2 || row[0] < 1.0 || row[0] != std::floor(row[0])) {
            throw InvalidArgument("schedule CSV rows must be iterations,temperature with integer iterations >= 1");
        }
        s.segments.push_back({static_cast<std::size_t>(row[0]), row[1]});
    }
    s.validate();
    return s;
}

}  // namespace annealbench
