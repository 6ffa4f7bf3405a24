#include "annealbench/sqa.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "annealbench/csv.hpp"

namespace annealbench {

namespace {
constexpr double kRampSlack = 1e-9;
}

void QuantumSchedule::validate() const {
    if (segments.empty()) {
        throw InvalidArgument("quantum schedule has no segments");
    }
    double prev = 1.0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& seg = segments[i];
        if (!(seg.duration_us > 0.0) || !std::isfinite(seg.duration_us)) {
            throw InvalidArgument("quantum schedule segment " + std::to_string(i) + " needs a positive duration");
        }
        if (!(seg.s_target >= 0.0 && seg.s_target <= 1.0)) {
            throw InvalidArgument("quantum schedule segment " + std::to_string(i) + " has s outside [0, 1]");
        }
        if (seg.s_target != prev) {
            const double minimum = 1.0 - std::min(prev, seg.s_target);
            if (seg.duration_us + kRampSlack < minimum) {
                throw InvalidArgument("ramp " + fmt(prev) + " -> " + fmt(seg.s_target) + " takes " +
                                      fmt(seg.duration_us) + " us, minimum is " + fmt(minimum) + " us");
            }
        }
        prev = seg.s_target;
    }
}

double QuantumSchedule::total_us() const {
    double t = 0.0;
    for (const auto& seg : segments) {
        t += seg.duration_us;
    }
    return t;
}

double QuantumSchedule::s_at(double t_us) const {
    double start = 0.0;
    double prev = 1.0;
    for (const auto& seg : segments) {
        if (t_us < start + seg.duration_us) {
            const double f = std::max(0.0, (t_us - start) / seg.duration_us);
            return prev + (seg.s_target - prev) * f;
        }
        start += seg.duration_us;
        prev = seg.s_target;
    }
    return prev;
}

QuantumSchedule reverse_anneal(double s_hold, double hold_us, double ramp_down_us, double ramp_up_us) {
    const double fastest = 1.0 - s_hold;
    QuantumSchedule q;
    if (s_hold < 1.0) {
        q.segments.push_back({ramp_down_us > 0.0 ? ramp_down_us : fastest, s_hold});
    }
    q.segments.push_back({hold_us, s_hold});
    if (s_hold < 1.0) {
        q.segments.push_back({ramp_up_us > 0.0 ? ramp_up_us : fastest, 1.0});
    }
    q.validate();
    return q;
}

QuantumSchedule preset_quantum_schedule(const std::string& name) {
    if (name == "u1") {
        return reverse_anneal(0.1, 100.0, 15.0, 250.0);
    }
    if (name == "u2") {
        return reverse_anneal(0.15, 50.0, 15.0, 50.0);
    }
    if (name == "u3") {
        return reverse_anneal(0.01, 100.0, 15.0, 250.0);
    }
    throw InvalidArgument("no quantum schedule preset for '" + name + "'");
}

QuantumSchedule load_quantum_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("cannot open schedule CSV '" + path + "'");
    }
    QuantumSchedule q;
    for (const auto& row : read_numeric_rows(in, {"duration_us", "s_target"})) {
        if (row.size() != 2) {
            throw InvalidArgument("quantum schedule rows must be duration_us,s_target");
        }
        q.segments.push_back({row[0], row[1]});
    }
    q.validate();
    return q;
}

TransverseCurves::TransverseCurves() : rows_{{{0.0, 1.0, 0.0}}, {{1.0, 0.0, 1.0}}} {}

TransverseCurves::TransverseCurves(std::vector<std::array<double, 3>> rows) : rows_(std::move(rows)) {
    if (rows_.size() < 2) {
        throw InvalidArgument("transverse curve table needs at least two rows");
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& r = rows_[i];
        if (!std::isfinite(r[0]) || !std::isfinite(r[1]) || !std::isfinite(r[2]) || r[1] < 0.0 || r[2] < 0.0) {
            throw InvalidArgument("transverse curve values must be finite and >= 0");
        }
        if (i > 0 && (r[0] <= rows_[i - 1][0] || r[2] < rows_[i - 1][2])) {
            throw InvalidArgument("transverse curve table must have increasing s and non-decreasing B");
        }
    }
    if (rows_.front()[0] > 0.0 || rows_.back()[0] < 1.0) {
        throw InvalidArgument("transverse curve table must cover s in [0, 1]");
    }
    if (std::abs(a(1.0)) > 1e-6) {
        throw InvalidArgument("transverse curve A(1) must vanish");
    }
}

double TransverseCurves::interp(double s, std::size_t col) const {
    s = std::clamp(s, 0.0, 1.0);
    auto hi = std::lower_bound(rows_.begin(), rows_.end(), s,
                               [](const std::array<double, 3>& r, double v) { return r[0] < v; });
    if (hi == rows_.begin()) {
        return (*hi)[col];
    }
    if (hi == rows_.end()) {
        return rows_.back()[col];
    }
    const auto lo = hi - 1;
    const double f = (s - (*lo)[0]) / ((*hi)[0] - (*lo)[0]);
    return (*lo)[col] + f * ((*hi)[col] - (*lo)[col]);
}

double TransverseCurves::a(double s) const { return interp(s, 1); }
double TransverseCurves::b(double s) const { return interp(s, 2); }

TransverseCurves load_curves_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("cannot open curves CSV '" + path + "'");
    }
    std::vector<std::array<double, 3>> rows;
    for (const auto& row : read_numeric_rows(in, {"s", "A", "B"})) {
        if (row.size() != 3) {
            throw InvalidArgument("curve rows must be s,A,B");
        }
        rows.push_back({row[0], row[1], row[2]});
    }
    return TransverseCurves(std::move(rows));
}

void SqaConfig::validate() const {
    if (slices < 2) {
        throw InvalidArgument("SQA needs at least 2 Trotter slices");
    }
    if (!(t_eff > 0.0) || !std::isfinite(t_eff)) {
        throw InvalidArgument("SQA effective temperature must be positive");
    }
    if (!(sweeps_per_us >= 1.0) || !std::isfinite(sweeps_per_us)) {
        throw InvalidArgument("SQA needs at least one sweep per microsecond");
    }
    if (num_reads == 0) {
        throw InvalidArgument("SQA needs at least one read");
    }
}

double slice_coupling(double a, std::size_t slices, double t_eff) {
    if (!(t_eff > 0.0)) {
        throw InvalidArgument("slice coupling needs a positive temperature");
    }
    if (slices < 2) {
        throw InvalidArgument("slice coupling needs at least 2 slices");
    }
    if (a < 0.0) {
        throw InvalidArgument("transverse field must be >= 0");
    }
    if (a == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return -0.5 * t_eff * std::log(std::tanh(a / (static_cast<double>(slices) * t_eff)));
}

double effective_energy(const IsingProblem& p, const std::vector<SpinState>& slices, double s,
                        const TransverseCurves& curves, const SqaConfig& config) {
    const std::size_t np = slices.size();
    if (np != config.slices) {
        throw InvalidArgument("slice count does not match the configuration");
    }
    double classical = 0.0;
    for (const auto& sl : slices) {
        if (sl.size() != p.size()) {
            throw InvalidArgument("slice size does not match the problem");
        }
        classical += energy(p, sl);
    }
    long long links = 0;
    for (std::size_t k = 0; k < np; ++k) {
        const auto& a = slices[k];
        const auto& b = slices[(k + 1) % np];
        for (std::size_t i = 0; i < p.size(); ++i) {
            links += a[i] * b[i];
        }
    }
    const double jp = slice_coupling(curves.a(s), np, config.t_eff);
    const double quantum = links == 0 ? 0.0 : jp * static_cast<double>(links);
    return curves.b(s) / static_cast<double>(np) * classical - quantum;
}

std::size_t ReadSet::valid_count() const {
    return static_cast<std::size_t>(std::count_if(reads.begin(), reads.end(), [](const Read& r) { return r.valid; }));
}

SpinState readout(const std::vector<SpinState>& slices, Rng& rng) {
    if (slices.empty()) {
        throw InvalidArgument("readout needs at least one slice");
    }
    const std::size_t n = slices.front().size();
    std::vector<std::int8_t> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        int vote = 0;
        for (const auto& sl : slices) {
            vote += sl[i];
        }
        if (vote == 0) {
            out[i] = rng.coin() ? 1 : -1;
        } else {
            out[i] = vote > 0 ? 1 : -1;
        }
    }
    return SpinState(std::move(out));
}

namespace {

/// Compressed adjacency for the inner loop.
struct Csr {
    std::vector<std::uint32_t> start;
    std::vector<std::uint32_t> index;
    std::vector<double> value;
    std::vector<double> field;
};

Csr compress(const IsingProblem& p) {
    Csr c;
    const std::size_t n = p.size();
    c.start.reserve(n + 1);
    c.start.push_back(0);
    c.field.assign(p.fields().begin(), p.fields().end());
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& nb : p.neighbors(i)) {
            c.index.push_back(static_cast<std::uint32_t>(nb.index));
            c.value.push_back(nb.value);
        }
        c.start.push_back(static_cast<std::uint32_t>(c.index.size()));
    }
    return c;
}

/// Proposals with dE / T above this are rejected without drawing a number.
constexpr double kRejectRatio = 40.0;

class PathIntegral {
public:
    PathIntegral(const Csr& csr, std::size_t n, std::size_t slices, const SpinState& init, double t_eff, Rng& rng)
        : csr_(csr), n_(n), p_(slices), t_(t_eff), rng_(rng), spin_(n * slices), local_(n * slices) {
        for (std::size_t k = 0; k < p_; ++k) {
            for (std::size_t i = 0; i < n_; ++i) {
                spin_[k * n_ + i] = init[i];
            }
        }
        for (std::size_t k = 0; k < p_; ++k) {
            for (std::size_t i = 0; i < n_; ++i) {
                local_[k * n_ + i] = field_of(k, i);
            }
        }
    }

    void sweep(double b_scale, double j_perp) {
        const double cls = b_scale / static_cast<double>(p_);
        const double limit = kRejectRatio * t_;
        if (std::isinf(j_perp)) {
            locked_sweep(cls, limit);
            return;
        }
        for (std::size_t k = 0; k < p_; ++k) {
            const std::int8_t* up = &spin_[((k + p_ - 1) % p_) * n_];
            const std::int8_t* down = &spin_[((k + 1) % p_) * n_];
            std::int8_t* row = &spin_[k * n_];
            double* loc = &local_[k * n_];
            for (std::size_t i = 0; i < n_; ++i) {
                const double s = row[i];
                const double de = s * (-2.0 * cls * loc[i] + 2.0 * j_perp * (up[i] + down[i]));
                if (accept(de, limit)) {
                    flip(row, loc, i);
                }
            }
        }
    }

    std::vector<SpinState> slices() const {
        std::vector<SpinState> out;
        out.reserve(p_);
        for (std::size_t k = 0; k < p_; ++k) {
            out.emplace_back(std::vector<std::int8_t>(spin_.begin() + static_cast<std::ptrdiff_t>(k * n_),
                                                      spin_.begin() + static_cast<std::ptrdiff_t>((k + 1) * n_)));
        }
        return out;
    }

private:
    double field_of(std::size_t k, std::size_t i) const {
        double f = csr_.field[i];
        for (std::uint32_t e = csr_.start[i]; e < csr_.start[i + 1]; ++e) {
            f += csr_.value[e] * spin_[k * n_ + csr_.index[e]];
        }
        return f;
    }

    bool accept(double de, double limit) {
        if (de <= 0.0) {
            return true;
        }
        if (de > limit) {
            return false;
        }
        return rng_.uniform() < std::exp(-de / t_);
    }

    void flip(std::int8_t* row, double* loc, std::size_t i) {
        const double change = -2.0 * row[i];
        row[i] = static_cast<std::int8_t>(-row[i]);
        for (std::uint32_t e = csr_.start[i]; e < csr_.start[i + 1]; ++e) {
            loc[csr_.index[e]] += csr_.value[e] * change;
        }
    }

    /// Flips spin i in every slice at once; the inter-slice term is unchanged.
    void locked_sweep(double cls, double limit) {
        for (std::size_t i = 0; i < n_; ++i) {
            double de = 0.0;
            for (std::size_t k = 0; k < p_; ++k) {
                de += -2.0 * spin_[k * n_ + i] * local_[k * n_ + i];
            }
            if (accept(cls * de, limit)) {
                for (std::size_t k = 0; k < p_; ++k) {
                    flip(&spin_[k * n_], &local_[k * n_], i);
                }
            }
        }
    }

    const Csr& csr_;
    std::size_t n_;
    std::size_t p_;
    double t_;
    Rng& rng_;
    std::vector<std::int8_t> spin_;
    std::vector<double> local_;
};

SpinState run_read(const Csr& csr, const IsingProblem& p, const QuantumSchedule& schedule,
                   const TransverseCurves& curves, const SqaConfig& cfg, const SpinState& init, std::uint64_t seed,
                   std::vector<SpinState>* final_slices) {
    Rng rng(seed);
    PathIntegral pi(csr, p.size(), cfg.slices, init, cfg.t_eff, rng);
    const auto steps = static_cast<std::size_t>(std::llround(schedule.total_us() * cfg.sweeps_per_us));
    double last_s = std::numeric_limits<double>::quiet_NaN();
    double b = 0.0;
    double jp = 0.0;
    for (std::size_t m = 0; m < steps; ++m) {
        const double s = schedule.s_at((static_cast<double>(m) + 0.5) / cfg.sweeps_per_us);
        if (s != last_s) {
            b = curves.b(s);
            jp = slice_coupling(curves.a(s), cfg.slices, cfg.t_eff);
            last_s = s;
        }
        pi.sweep(b, jp);
    }
    auto slices = pi.slices();
    SpinState out = readout(slices, rng);
    if (final_slices) {
        *final_slices = std::move(slices);
    }
    return out;
}

void check_inputs(const IsingProblem& p, const QuantumSchedule& schedule, const SqaConfig& config,
                  const SpinState& init) {
    schedule.validate();
    config.validate();
    if (init.size() != p.size()) {
        throw InvalidArgument("initial state has " + std::to_string(init.size()) + " spins, problem has " +
                              std::to_string(p.size()));
    }
}

}  // namespace

SpinState sqa_single_read(const IsingProblem& p, const QuantumSchedule& schedule, const TransverseCurves& curves,
                          const SqaConfig& config, const SpinState& init, std::uint64_t seed,
                          std::vector<SpinState>* final_slices) {
    check_inputs(p, schedule, config, init);
    const Csr csr = compress(p);
    return run_read(csr, p, schedule, curves, config, init, seed, final_slices);
}

ReadSet sqa_run(const IsingProblem& p, const QuantumSchedule& schedule, const TransverseCurves& curves,
                const SqaConfig& config, const SpinState& init, const std::optional<DwLayout>& layout) {
    check_inputs(p, schedule, config, init);
    if (layout && layout->spin_count() != p.size()) {
        throw InvalidArgument("layout does not match the problem size");
    }
    const Csr csr = compress(p);
    ReadSet rs;
    rs.layout = layout;
    rs.reads.reserve(config.num_reads);
    for (std::size_t r = 0; r < config.num_reads; ++r) {
        Read read;
        read.state = run_read(csr, p, schedule, curves, config, init, derive_seed(config.seed, r), nullptr);
        read.energy = energy(p, read.state);
        if (layout) {
            read.decoded = decode(read.state, *layout);
            read.valid = read.decoded.valid;
        }
        rs.reads.push_back(std::move(read));
    }
    return rs;
}

DecodedSample mode_of_reads(const ReadSet& reads, const DwLayout& layout) {
    struct Bin {
        std::size_t count = 0;
        double best_energy = std::numeric_limits<double>::infinity();
    };
    std::map<std::pair<std::size_t, std::size_t>, Bin> bins;
    for (const auto& r : reads.reads) {
        if (r.state.size() != layout.spin_count()) {
            throw InvalidArgument("read size does not match the layout");
        }
        const DecodedSample d = decode(r.state, layout);
        if (!d.valid) {
            continue;
        }
        Bin& b = bins[{d.k_phi, d.k_psi}];
        ++b.count;
        b.best_energy = std::min(b.best_energy, r.energy);
    }
    if (bins.empty()) {
        throw NoValidReads();
    }
    auto best = bins.begin();
    for (auto it = bins.begin(); it != bins.end(); ++it) {
        if (it->second.count > best->second.count ||
            (it->second.count == best->second.count && it->second.best_energy < best->second.best_energy)) {
            best = it;
        }
    }
    DecodedSample out;
    out.k_phi = best->first.first;
    out.k_psi = best->first.second;
    out.phi = layout.value(Axis::phi, out.k_phi);
    out.psi = layout.value(Axis::psi, out.k_psi);
    out.walls_phi = 1;
    out.walls_psi = 1;
    out.valid = true;
    return out;
}

std::string reads_csv(const ReadSet& reads) {
    std::string out = "read_index,valid,phi,psi,energy\n";
    for (std::size_t i = 0; i < reads.reads.size(); ++i) {
        const auto& r = reads.reads[i];
        const bool decoded = reads.layout.has_value();
        out += std::to_string(i) + "," + (r.valid ? "1" : "0") + "," + (decoded ? fmt(r.decoded.phi) : "") + "," +
               (decoded ? fmt(r.decoded.psi) : "") + "," + fmt(r.energy) + "\n";
    }
    return out;
}

}  // namespace annealbench
