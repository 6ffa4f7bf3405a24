#include "annealbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "annealbench/csv.hpp"

namespace annealbench {

std::string method_name(Method m) {
    switch (m) {
        case Method::nm:
            return "NM";
        case Method::gd:
            return "GD";
        case Method::ta:
            return "TA";
        case Method::qa:
            return "QA";
    }
    return "?";
}

Method parse_method(const std::string& name) {
    std::string k;
    for (char c : name) {
        k += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (k == "nm") {
        return Method::nm;
    }
    if (k == "gd") {
        return Method::gd;
    }
    if (k == "ta") {
        return Method::ta;
    }
    if (k == "qa") {
        return Method::qa;
    }
    throw InvalidArgument("unknown method '" + name + "' (nm, gd, ta, qa)");
}

std::vector<Method> parse_methods(const std::string& list) {
    std::vector<Method> out;
    for (const auto& cell : split_csv_line(list)) {
        if (!cell.empty()) {
            out.push_back(parse_method(cell));
        }
    }
    if (out.empty()) {
        throw InvalidArgument("empty method list");
    }
    return out;
}

MethodConfig preset_config(const std::string& potential) {
    MethodConfig c;
    c.potential = potential;
    if (potential == "u1") {
        c.lambda_classical = 0.5;
        c.lambda_quantum = 0.7;
        c.thermal = preset_schedule("u1-paper");
        c.quantum = preset_quantum_schedule("u1");
    } else if (potential == "u2") {
        c.lambda_classical = 0.5;
        c.lambda_quantum = 10.0;
        c.thermal = preset_schedule("u1-paper");
        c.quantum = preset_quantum_schedule("u2");
    } else if (potential == "u3") {
        c.lambda_classical = 1.7;
        c.lambda_quantum = 1.7;
        c.thermal = preset_schedule("u3-paper");
        c.quantum = preset_quantum_schedule("u3");
    } else {
        c.lambda_classical = 1.0;
        c.lambda_quantum = 1.0;
        c.thermal = preset_schedule("u1-paper");
        c.quantum = preset_quantum_schedule("u1");
    }
    return c;
}

nlohmann::json config_to_json(const MethodConfig& c) {
    nlohmann::json j;
    j["potential"] = c.potential;
    j["u2_literal_sign"] = c.u2_literal_sign;
    j["lambda_classical"] = c.lambda_classical;
    j["lambda_quantum"] = c.lambda_quantum;
    if (c.bounds) {
        j["bounds"] = {c.bounds->phi_lo, c.bounds->phi_hi, c.bounds->psi_lo, c.bounds->psi_hi};
    }
    j["n"] = c.n;
    j["encode_mode"] = c.encode_mode == EncodeMode::h_linear ? "h" : "j";
    j["nm"] = {{"alpha", c.nm.alpha},         {"gamma", c.nm.gamma},         {"beta", c.nm.beta},
               {"sigma", c.nm.sigma},         {"stddev_tol", c.nm.stddev_tol}, {"max_iters", c.nm.max_iters},
               {"initial_edge", c.nm.initial_edge}};
    j["cg"] = {{"max_iters", c.cg.max_iters},
               {"grad_tol", c.cg.grad_tol},
               {"restart_period", c.cg.restart_period},
               {"armijo_c", c.cg.armijo_c},
               {"backtrack", c.cg.backtrack},
               {"initial_step", c.cg.initial_step},
               {"beta", c.cg.beta == CgBeta::none ? "none" : "pr+"}};
    nlohmann::json th = nlohmann::json::array();
    for (const auto& s : c.thermal.segments) {
        th.push_back({s.iterations, s.temperature});
    }
    j["thermal"] = {{"name", c.thermal.name}, {"segments", th}};
    nlohmann::json q = nlohmann::json::array();
    for (const auto& s : c.quantum.segments) {
        q.push_back({s.duration_us, s.s_target});
    }
    j["quantum"] = q;
    j["curves"] = c.curves.rows();
    j["sqa"] = {{"slices", c.sqa.slices},
                {"t_eff", c.sqa.t_eff},
                {"sweeps_per_us", c.sqa.sweeps_per_us},
                {"num_reads", c.sqa.num_reads}};
    return j;
}

Potential make_potential(const MethodConfig& c, bool quantum) {
    Potential p = Potential::from_name(c.potential, quantum ? c.lambda_quantum : c.lambda_classical, c.u2_literal_sign);
    return c.bounds ? p.with_bounds(*c.bounds) : p;
}

double success_threshold(const Bounds& b, std::size_t n) {
    if (n < 3) {
        throw InvalidArgument("success threshold needs n >= 3");
    }
    const double steps = static_cast<double>(n - 2);
    return 2.0 * std::max((b.phi_hi - b.phi_lo) / steps, (b.psi_hi - b.psi_lo) / steps);
}

namespace {

struct Encoded {
    DwLayout layout;
    IsingProblem problem;
};

Encoded encode(const Potential& p, std::size_t n, EncodeMode mode) {
    const PotentialTable table = sample(p, n);
    const Penalties pen = auto_penalties(table);
    const DwLayout layout = layout_for_bounds(n, p.bounds(), pen.chain, pen.pin);
    IsingProblem prob = encode_potential(layout, table, mode);
    prob.set_label(p.name() + " " + prob.label());
    return {layout, std::move(prob)};
}

double micros_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Solver::Solver(MethodConfig config)
    : config_(std::move(config)),
      classical_(make_potential(config_, false)),
      quantum_(make_potential(config_, true)),
      truth_(true_minimum(classical_)) {
    config_.thermal.validate();
    config_.quantum.validate();
    config_.sqa.validate();
    auto c = encode(classical_, config_.n, config_.encode_mode);
    c_layout_ = c.layout;
    c_problem_ = std::move(c.problem);
    auto q = encode(quantum_, config_.n, config_.encode_mode);
    q_layout_ = q.layout;
    q_problem_ = std::move(q.problem);
}

RunRecord Solver::finish(Method m, Point start, Point result, bool valid, std::uint64_t seed, double us) const {
    RunRecord r;
    r.method = method_name(m);
    r.potential = classical_.name();
    r.start = start;
    r.result = result;
    r.delta = distance_to_truth(truth_, result);
    r.energy = (m == Method::qa ? quantum_ : classical_).eval(result);
    r.valid = valid;
    r.seed = seed;
    r.wall_time_us = us;
    return r;
}

RunRecord Solver::run(Method m, Point start, std::uint64_t seed) const {
    if (m == Method::qa) {
        return run_qa(start, seed, nullptr);
    }
    const auto t0 = std::chrono::steady_clock::now();
    switch (m) {
        case Method::nm: {
            const auto r = nelder_mead(objective_of(classical_), start, config_.nm);
            return finish(m, start, r.point, true, 0, micros_since(t0));
        }
        case Method::gd: {
            CgParams prm = config_.cg;
            if (!prm.clamp) {
                prm.clamp = classical_.bounds();
            }
            const auto r = conjugate_gd(objective_of(classical_), start, prm);
            return finish(m, start, r.point, true, 0, micros_since(t0));
        }
        case Method::ta: {
            const SpinState init = plant_point(c_layout_, start.phi, start.psi);
            const auto r = run_thermal(c_problem_, config_.thermal, init, seed);
            const auto d = decode(r.state, c_layout_);
            return finish(m, start, {d.phi, d.psi}, d.valid, seed, micros_since(t0));
        }
        case Method::qa:
            break;
    }
    throw InvalidArgument("unsupported method");
}

RunRecord Solver::run_qa(Point start, std::uint64_t seed, ReadSet* reads) const {
    const auto t0 = std::chrono::steady_clock::now();
    SqaConfig cfg = config_.sqa;
    cfg.seed = seed;
    const SpinState init = plant_point(q_layout_, start.phi, start.psi);
    ReadSet rs = sqa_run(q_problem_, config_.quantum, config_.curves, cfg, init, q_layout_);
    RunRecord rec;
    try {
        const auto d = mode_of_reads(rs, q_layout_);
        rec = finish(Method::qa, start, {d.phi, d.psi}, true, seed, micros_since(t0));
    } catch (const NoValidReads&) {
        rec = finish(Method::qa, start, start, false, seed, micros_since(t0));
    }
    if (reads) {
        *reads = std::move(rs);
    }
    return rec;
}

std::vector<Point> start_grid(const Bounds& b, std::size_t side) {
    if (side == 0) {
        throw InvalidArgument("start grid needs at least one point per side");
    }
    std::vector<Point> out;
    out.reserve(side * side);
    const double hx = (b.phi_hi - b.phi_lo) / static_cast<double>(side);
    const double hy = (b.psi_hi - b.psi_lo) / static_cast<double>(side);
    for (std::size_t i = 0; i < side; ++i) {
        for (std::size_t j = 0; j < side; ++j) {
            out.push_back({b.phi_lo + (static_cast<double>(i) + 0.5) * hx, b.psi_lo + (static_cast<double>(j) + 0.5) * hy});
        }
    }
    return out;
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) {
                    return;
                }
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                    next = count;
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

std::size_t default_threads() {
    if (const char* env = std::getenv("ANNEALBENCH_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return static_cast<std::size_t>(v);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<RunRecord> basin_map(const Solver& solver, Method m, const std::vector<Point>& starts,
                                 std::uint64_t master_seed, std::size_t threads) {
    std::vector<RunRecord> out(starts.size());
    parallel_for(starts.size(), threads,
                 [&](std::size_t i) { out[i] = solver.run(m, starts[i], derive_seed(master_seed, i)); });
    return out;
}

double success_fraction(const std::vector<RunRecord>& records, double threshold) {
    if (records.empty()) {
        return 0.0;
    }
    const auto hits = std::count_if(records.begin(), records.end(),
                                    [&](const RunRecord& r) { return r.valid && r.delta < threshold; });
    return static_cast<double>(hits) / static_cast<double>(records.size());
}

double fraction_within(const std::vector<RunRecord>& records, Point centre, double radius) {
    if (records.empty()) {
        return 0.0;
    }
    const auto hits = std::count_if(records.begin(), records.end(), [&](const RunRecord& r) {
        return r.valid && std::hypot(r.result.phi - centre.phi, r.result.psi - centre.psi) < radius;
    });
    return static_cast<double>(hits) / static_cast<double>(records.size());
}

std::string run_records_csv(const std::vector<RunRecord>& records) {
    std::string out = "method,potential,phi_start,psi_start,phi_out,psi_out,delta,energy,valid,seed,wall_time_us\n";
    for (const auto& r : records) {
        out += r.method + "," + r.potential + "," + fmt(r.start.phi) + "," + fmt(r.start.psi) + "," +
               fmt(r.result.phi) + "," + fmt(r.result.psi) + "," + fmt(r.delta) + "," + fmt(r.energy) + "," +
               (r.valid ? "1" : "0") + "," + std::to_string(r.seed) + "," + fmt(r.wall_time_us) + "\n";
    }
    return out;
}

std::vector<RunRecord> parse_run_records_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<RunRecord> out;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (header) {
            header = false;
            if (line.rfind("method,", 0) == 0) {
                continue;
            }
        }
        const auto c = split_csv_line(line);
        if (c.size() != 11) {
            throw InvalidArgument("run record row has " + std::to_string(c.size()) + " cells, expected 11");
        }
        try {
            RunRecord r;
            r.method = c[0];
            r.potential = c[1];
            r.start = {std::stod(c[2]), std::stod(c[3])};
            r.result = {std::stod(c[4]), std::stod(c[5])};
            r.delta = std::stod(c[6]);
            r.energy = std::stod(c[7]);
            r.valid = c[8] == "1";
            r.seed = std::stoull(c[9]);
            r.wall_time_us = std::stod(c[10]);
            out.push_back(r);
        } catch (const std::logic_error&) {
            throw InvalidArgument("malformed run record row: " + line);
        }
    }
    return out;
}

std::vector<StartDistribution> distance_histograms(const Solver& solver, Method m, const std::vector<Point>& starts,
                                                   std::size_t reps, std::uint64_t master_seed,
                                                   std::size_t threads) {
    if (reps == 0) {
        throw InvalidArgument("histograms need at least one repetition");
    }
    const bool stochastic = m == Method::ta || m == Method::qa;
    const std::size_t per_start = stochastic ? reps : 1;
    std::vector<double> deltas(starts.size() * per_start);
    parallel_for(deltas.size(), threads, [&](std::size_t t) {
        const std::size_t s = t / per_start;
        const std::size_t rep = t % per_start;
        deltas[t] = solver.run(m, starts[s], derive_seed(master_seed, s * reps + rep)).delta;
    });
    std::vector<StartDistribution> out;
    for (std::size_t s = 0; s < starts.size(); ++s) {
        StartDistribution d;
        d.method = method_name(m);
        d.start = starts[s];
        for (std::size_t rep = 0; rep < reps; ++rep) {
            d.deltas.push_back(deltas[s * per_start + (stochastic ? rep : 0)]);
        }
        d.distinct = std::set<double>(d.deltas.begin(), d.deltas.end()).size();
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<HistogramBin> histogram(const std::vector<double>& values, double lo, double hi, std::size_t bins) {
    if (bins == 0 || !(hi > lo)) {
        throw InvalidArgument("histogram needs bins >= 1 and hi > lo");
    }
    std::vector<HistogramBin> out(bins);
    const double w = (hi - lo) / static_cast<double>(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        out[b] = {lo + w * static_cast<double>(b), lo + w * static_cast<double>(b + 1), 0};
    }
    for (double v : values) {
        auto b = static_cast<std::ptrdiff_t>(std::floor((v - lo) / w));
        b = std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(bins) - 1);
        ++out[static_cast<std::size_t>(b)].count;
    }
    return out;
}

std::string histograms_csv(const std::vector<StartDistribution>& dists, double hi, std::size_t bins) {
    std::string out = "method,start_index,phi_start,psi_start,bin_lo,bin_hi,count\n";
    for (std::size_t s = 0; s < dists.size(); ++s) {
        const auto& d = dists[s];
        for (const auto& b : histogram(d.deltas, 0.0, hi, bins)) {
            out += d.method + "," + std::to_string(s) + "," + fmt(d.start.phi) + "," + fmt(d.start.psi) + "," +
                   fmt(b.lo) + "," + fmt(b.hi) + "," + std::to_string(b.count) + "\n";
        }
    }
    return out;
}

SweepStart parse_sweep_start(const std::string& name) {
    if (name == "random") {
        return SweepStart::random;
    }
    if (name == "ordered") {
        return SweepStart::ordered;
    }
    if (name == "ladder") {
        return SweepStart::ladder;
    }
    throw InvalidArgument("unknown start mode '" + name + "' (random, ordered, ladder)");
}

std::string sweep_start_name(SweepStart s) {
    switch (s) {
        case SweepStart::random:
            return "random";
        case SweepStart::ordered:
            return "ordered";
        case SweepStart::ladder:
            return "ladder";
    }
    return "?";
}

void SweepResult::aggregate() {
    const std::size_t k = values.size();
    eta_mean.assign(k, 0.0);
    eta_std.assign(k, 0.0);
    m_mean.assign(k, 0.0);
    m_std.assign(k, 0.0);
    count.assign(k, 0);
    auto stats = [](const std::vector<double>& xs, double& mean, double& sd) {
        mean = 0.0;
        sd = 0.0;
        if (xs.empty()) {
            return;
        }
        for (double x : xs) {
            mean += x;
        }
        mean /= static_cast<double>(xs.size());
        if (xs.size() < 2) {
            return;
        }
        double acc = 0.0;
        for (double x : xs) {
            acc += (x - mean) * (x - mean);
        }
        sd = std::sqrt(acc / static_cast<double>(xs.size() - 1));
    };
    for (std::size_t i = 0; i < k; ++i) {
        stats(eta[i], eta_mean[i], eta_std[i]);
        stats(m[i], m_mean[i], m_std[i]);
        count[i] = m[i].size();
    }
}

namespace {

constexpr std::uint64_t kSharedStateStream = 0xfeedULL;

SpinState sweep_init(std::size_t spins, SweepStart start, std::uint64_t seed) {
    if (start == SweepStart::ordered) {
        return SpinState(spins, 1);
    }
    return random_state(spins, derive_seed(seed, kSharedStateStream));
}

/// Equilibrates, then averages eta and M over the measurement sweeps.
void thermal_samples(const IsingProblem& grid, double lambda, double t, const ThermalProtocol& prm, SpinState& s,
                     std::uint64_t seed, double& eta, double& mag) {
    Rng rng(seed);
    std::vector<std::size_t> order;
    double e = energy(grid, s);
    for (std::size_t it = 0; it < prm.equilibrate; ++it) {
        metropolis_sweep(grid, s, t, rng, order, e);
    }
    eta = 0.0;
    mag = 0.0;
    for (std::size_t it = 0; it < prm.measure; ++it) {
        metropolis_sweep(grid, s, t, rng, order, e);
        eta += normalized_energy(grid, s, lambda);
        mag += magnetisation(s);
    }
    eta /= static_cast<double>(prm.measure);
    mag /= static_cast<double>(prm.measure);
}

}  // namespace

SweepResult ising_thermal_sweep(std::size_t n, double lambda, const std::vector<double>& temperatures,
                                const ThermalProtocol& protocol, std::uint64_t seed, std::size_t threads) {
    if (temperatures.empty() || protocol.repetitions == 0 || protocol.measure == 0) {
        throw InvalidArgument("thermal sweep needs temperatures, repetitions >= 1 and measure >= 1");
    }
    for (double t : temperatures) {
        if (!(t >= 0.0) || !std::isfinite(t)) {
            throw InvalidArgument("sweep temperatures must be finite and >= 0");
        }
    }
    const IsingProblem grid = build_2d_grid({n, lambda});
    const SpinState init = sweep_init(grid.size(), protocol.start, seed);
    const std::size_t nt = temperatures.size();
    const std::size_t reps = protocol.repetitions;
    SweepResult r;
    r.axis = "temperature";
    r.values = temperatures;
    std::vector<double> eta(nt * reps);
    std::vector<double> mag(nt * reps);
    if (protocol.start == SweepStart::ladder) {
        std::vector<std::size_t> order(nt);
        for (std::size_t i = 0; i < nt; ++i) {
            order[i] = i;
        }
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return temperatures[a] > temperatures[b]; });
        parallel_for(reps, threads, [&](std::size_t rep) {
            SpinState s = init;
            for (std::size_t i : order) {
                thermal_samples(grid, lambda, temperatures[i], protocol, s, derive_seed(seed, i * reps + rep),
                                eta[i * reps + rep], mag[i * reps + rep]);
            }
        });
    } else {
        parallel_for(nt * reps, threads, [&](std::size_t task) {
            SpinState s = init;
            thermal_samples(grid, lambda, temperatures[task / reps], protocol, s, derive_seed(seed, task), eta[task],
                            mag[task]);
        });
    }
    for (std::size_t i = 0; i < nt; ++i) {
        r.eta.emplace_back(eta.begin() + static_cast<std::ptrdiff_t>(i * reps),
                           eta.begin() + static_cast<std::ptrdiff_t>((i + 1) * reps));
        r.m.emplace_back(mag.begin() + static_cast<std::ptrdiff_t>(i * reps),
                         mag.begin() + static_cast<std::ptrdiff_t>((i + 1) * reps));
    }
    r.aggregate();
    return r;
}

SweepResult ising_lambda_sweep(std::size_t n, const std::vector<double>& lambdas, const QuantumSweepOptions& opt,
                               std::uint64_t seed, std::size_t threads) {
    if (lambdas.empty() || opt.reads == 0) {
        throw InvalidArgument("quantum sweep needs lambda values and reads >= 1");
    }
    if (opt.start == SweepStart::ladder) {
        throw InvalidArgument("the quantum sweep supports random and ordered starts only");
    }
    const QuantumSchedule schedule = reverse_anneal(opt.s_hold, opt.hold_us);
    const std::size_t nl = lambdas.size();
    std::vector<IsingProblem> grids;
    for (double l : lambdas) {
        grids.push_back(build_2d_grid({n, l}));
    }
    const SpinState init = sweep_init(n * n, opt.start, seed);
    std::vector<double> eta(nl * opt.reads);
    std::vector<double> mag(nl * opt.reads);
    parallel_for(nl * opt.reads, threads, [&](std::size_t task) {
        const std::size_t li = task / opt.reads;
        const SpinState out =
            sqa_single_read(grids[li], schedule, opt.curves, opt.sqa, init, derive_seed(seed, task));
        eta[task] = normalized_energy(grids[li], out, lambdas[li]);
        mag[task] = magnetisation(out);
    });
    SweepResult r;
    r.axis = "lambda";
    r.values = lambdas;
    for (std::size_t i = 0; i < nl; ++i) {
        r.eta.emplace_back(eta.begin() + static_cast<std::ptrdiff_t>(i * opt.reads),
                           eta.begin() + static_cast<std::ptrdiff_t>((i + 1) * opt.reads));
        r.m.emplace_back(mag.begin() + static_cast<std::ptrdiff_t>(i * opt.reads),
                         mag.begin() + static_cast<std::ptrdiff_t>((i + 1) * opt.reads));
    }
    r.aggregate();
    return r;
}

std::string sweep_csv(const SweepResult& r) {
    std::string out = "axis_value,eta_mean,eta_std,m_mean,m_std,count\n";
    for (std::size_t i = 0; i < r.values.size(); ++i) {
        out += fmt(r.values[i]) + "," + fmt(r.eta_mean[i]) + "," + fmt(r.eta_std[i]) + "," + fmt(r.m_mean[i]) + "," +
               fmt(r.m_std[i]) + "," + std::to_string(r.count[i]) + "\n";
    }
    return out;
}

std::vector<StudyRow> lambda_scaling_study(const MethodConfig& base, const std::vector<double>& lambdas,
                                           const std::vector<Point>& starts, std::uint64_t seed,
                                           std::size_t threads) {
    std::vector<StudyRow> rows;
    for (double l : lambdas) {
        MethodConfig c = base;
        c.lambda_quantum = l;
        const Solver solver(c);
        const auto recs = basin_map(solver, Method::qa, starts, seed, threads);
        rows.push_back({l, Method::qa, success_fraction(recs, solver.threshold()), recs.size()});
    }
    return rows;
}

std::vector<StudyRow> grid_size_study(const MethodConfig& base, const std::vector<std::size_t>& n_values,
                                      const std::vector<Method>& methods, const std::vector<Point>& starts,
                                      std::uint64_t seed, std::size_t threads) {
    std::vector<StudyRow> rows;
    for (std::size_t n : n_values) {
        if (n < 8) {
            throw InvalidArgument("grid-size study needs n >= 8");
        }
        MethodConfig c = base;
        c.n = n;
        const Solver solver(c);
        for (Method m : methods) {
            const auto recs = basin_map(solver, m, starts, seed, threads);
            rows.push_back({static_cast<double>(n), m, success_fraction(recs, solver.threshold()), recs.size()});
        }
    }
    return rows;
}

double reference_timing_us(Method m) {
    switch (m) {
        case Method::nm:
            return 4900.0;
        case Method::gd:
            return 2900.0;
        case Method::ta:
            return 5e5;
        case Method::qa:
            return 115.0;
    }
    return 0.0;
}

std::vector<TimingRow> timing_table(const Solver& solver, const std::vector<Method>& methods, std::size_t reps,
                                    std::uint64_t seed) {
    if (reps < 10) {
        throw InvalidArgument("timing table needs at least 10 repetitions");
    }
    const auto starts = start_grid(solver.bounds(), 10);
    std::vector<TimingRow> rows;
    for (Method m : methods) {
        std::vector<double> t;
        for (std::size_t i = 0; i < reps; ++i) {
            t.push_back(solver.run(m, starts[i % starts.size()], derive_seed(seed, i)).wall_time_us);
        }
        SweepResult tmp;
        tmp.values = {0.0};
        tmp.eta = {t};
        tmp.m = {t};
        tmp.aggregate();
        rows.push_back({m, tmp.m_mean[0], tmp.m_std[0], reps, reference_timing_us(m)});
    }
    return rows;
}

std::string timing_csv(const std::vector<TimingRow>& rows) {
    std::string out = "method,mean_us,std_us,reps,reference_us\n";
    for (const auto& r : rows) {
        out += method_name(r.method) + "," + fmt(r.mean_us) + "," + fmt(r.std_us) + "," + std::to_string(r.reps) +
               "," + fmt(r.reference_us) + "\n";
    }
    return out;
}

namespace {

std::string colour(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(255 * t);
    const int b = static_cast<int>(255 * (1.0 - t));
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x40%02x", r, b);
    return buf;
}

}  // namespace

std::string basin_svg(const std::vector<RunRecord>& records, std::size_t side, const std::string& title) {
    if (side == 0 || records.size() != side * side) {
        throw InvalidArgument("basin heatmap needs side * side records");
    }
    const int cell = static_cast<int>(std::max<std::size_t>(4, 400 / side));
    const int size = cell * static_cast<int>(side);
    double hi = 0.0;
    for (const auto& r : records) {
        hi = std::max(hi, r.delta);
    }
    hi = hi > 0.0 ? hi : 1.0;
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size + 24 << "\">\n";
    o << "<text x=\"4\" y=\"16\" font-size=\"12\">" << title << " (delta, max " << fmt(hi) << ")</text>\n";
    for (std::size_t i = 0; i < side; ++i) {
        for (std::size_t j = 0; j < side; ++j) {
            const auto& r = records[i * side + j];
            // phi along x, psi upwards
            const int x = static_cast<int>(i) * cell;
            const int y = 24 + static_cast<int>(side - 1 - j) * cell;
            o << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
              << "\" fill=\"" << (r.valid ? colour(r.delta / hi) : std::string("#808080")) << "\"/>\n";
        }
    }
    o << "</svg>\n";
    return o.str();
}

std::string sweep_svg(const SweepResult& r, const std::string& title) {
    const double w = 480;
    const double h = 300;
    const double pad = 40;
    double lo = r.values.empty() ? 0.0 : *std::min_element(r.values.begin(), r.values.end());
    double hi = r.values.empty() ? 1.0 : *std::max_element(r.values.begin(), r.values.end());
    if (!(hi > lo)) {
        hi = lo + 1.0;
    }
    auto px = [&](double v) { return pad + (v - lo) / (hi - lo) * (w - 2 * pad); };
    // both eta and M live in [-1, 1]
    auto py = [&](double v) { return h - pad - (v + 1.0) / 2.0 * (h - 2 * pad); };
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    o << "<text x=\"4\" y=\"16\" font-size=\"12\">" << title << " (" << r.axis << "; blue M, red eta)</text>\n";
    o << "<line x1=\"" << pad << "\" y1=\"" << py(0) << "\" x2=\"" << w - pad << "\" y2=\"" << py(0)
      << "\" stroke=\"#ccc\"/>\n";
    for (int series = 0; series < 2; ++series) {
        const auto& ys = series == 0 ? r.m_mean : r.eta_mean;
        o << "<polyline fill=\"none\" stroke=\"" << (series == 0 ? "blue" : "red") << "\" points=\"";
        for (std::size_t i = 0; i < r.values.size() && i < ys.size(); ++i) {
            o << px(r.values[i]) << "," << py(ys[i]) << " ";
        }
        o << "\"/>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace annealbench
