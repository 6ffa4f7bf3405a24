// Acceptance run: one PASS/FAIL line per criterion.
// Usage: acceptance <annealbench cli> <work dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <sys/wait.h>

#include "annealbench/csv.hpp"
#include "annealbench/harness.hpp"

using namespace annealbench;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string cli_path;
fs::path work_dir;
std::size_t threads = 1;

std::string f3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

/// Emulator knobs used for every QA basin map below.
MethodConfig accept_config(const std::string& potential) {
    MethodConfig c = preset_config(potential);
    c.sqa.slices = 16;
    c.sqa.sweeps_per_us = 5;
    c.sqa.num_reads = 100;
    return c;
}

PotentialTable random_table(std::size_t n, Rng& rng) {
    PotentialTable t;
    t.n = n;
    t.bounds = {0, 1, 0, 1};
    t.values.resize(n * n);
    for (auto& v : t.values) v = rng.uniform() * 20 - 10;
    return t;
}

Outcome encoder_exactness() {
    Rng rng(101);
    std::size_t tables = 0, checked = 0;
    double worst = 0.0;
    for (std::size_t n : {6, 8, 12}) {
        std::vector<PotentialTable> list;
        for (int t = 0; t < 50; ++t) list.push_back(random_table(n, rng));
        for (const auto& p : {Potential::u1(0.5), Potential::u2(10), Potential::u3(1.7)}) list.push_back(sample(p, n));
        for (const auto& table : list) {
            const auto pen = auto_penalties(table);
            const auto layout = layout_for_bounds(n, table.bounds, pen.chain, pen.pin);
            for (auto mode : {EncodeMode::h_linear, EncodeMode::j_linear}) {
                const auto prob = encode_potential(layout, table, mode);
                const double base = chain_baseline(layout);
                for (std::size_t a = 1; a < n; ++a) {
                    for (std::size_t b = 1; b < n; ++b) {
                        const auto s = plant(layout, a, b);
                        const auto d = decode(s, layout);
                        if (!d.valid || d.k_phi != a || d.k_psi != b) return {false, "plant/decode mismatch"};
                        worst = std::max(worst, std::abs(energy(prob, s) - base - table.at(a, b)));
                        ++checked;
                    }
                }
            }
            ++tables;
        }
    }
    return {worst < 1e-9, std::to_string(tables) + " tables x 2 encodings, " + std::to_string(checked) +
                              " faithful states, max error " + fmt(worst)};
}

Outcome penalty_dominance() {
    const std::size_t n = 8;
    Rng rng(202);
    std::vector<PotentialTable> list;
    for (int t = 0; t < 3; ++t) list.push_back(random_table(n, rng));
    for (const auto& p : {Potential::u1(0.7), Potential::u2(10), Potential::u3(1.7)}) list.push_back(sample(p, n));
    double min_gap = 1e300;
    for (const auto& table : list) {
        const auto pen = auto_penalties(table);
        const auto layout = layout_for_bounds(n, table.bounds, pen.chain, pen.pin);
        const auto prob = encode_potential(layout, table);
        double worst_faithful = -1e300, best_unfaithful = 1e300;
        SpinState s(2 * n, 1);
        for (std::uint64_t m = 0; m < (1ULL << (2 * n)); ++m) {
            for (std::size_t i = 0; i < 2 * n; ++i) s.set(i, (m >> i) & 1 ? 1 : -1);
            const double e = energy(prob, s);
            if (decode(s, layout).valid) {
                worst_faithful = std::max(worst_faithful, e);
            } else {
                best_unfaithful = std::min(best_unfaithful, e);
            }
        }
        min_gap = std::min(min_gap, best_unfaithful - worst_faithful);
    }
    return {min_gap > 0, std::to_string(list.size()) + " tables, 65536 states each, smallest gap " + f3(min_gap)};
}

Outcome thermal_transition() {
    ThermalProtocol prm;
    prm.start = SweepStart::ladder;
    std::vector<double> temps;
    for (int i = 0; i < 15; ++i) temps.push_back(0.5 + 0.25 * i);
    const auto r = ising_thermal_sweep(16, 1.0, temps, prm, 7, threads);
    std::size_t steep = 0;
    for (std::size_t i = 0; i + 1 < temps.size(); ++i) {
        if (r.m_mean[i] - r.m_mean[i + 1] > r.m_mean[steep] - r.m_mean[steep + 1]) steep = i;
    }
    const double mid = 0.5 * (temps[steep] + temps[steep + 1]);
    write_file((work_dir / "thermal_sweep.csv").string(), sweep_csv(r));
    const bool ok = r.m_mean.front() > 0.9 && r.m_mean.back() < 0.2 && mid >= 1.8 && mid <= 2.8;
    return {ok, "M(0.5)=" + f3(r.m_mean.front()) + " M(4.0)=" + f3(r.m_mean.back()) + " steepest drop at T=" +
                    f3(mid) + " (exact critical temperature 2.269)"};
}

Outcome quantum_transition() {
    QuantumSweepOptions opt;
    opt.reads = 20;
    opt.start = SweepStart::ordered;
    std::vector<double> lambdas;
    for (int i = 0; i < 10; ++i) lambdas.push_back(0.05 + (4.0 - 0.05) * i / 9.0);
    const auto r = ising_lambda_sweep(16, lambdas, opt, 7, threads);
    bool monotone = true;
    for (std::size_t i = 0; i + 1 < lambdas.size(); ++i) {
        if (r.m_mean[i + 1] + r.m_std[i + 1] < r.m_mean[i] - r.m_std[i]) monotone = false;
    }
    write_file((work_dir / "quantum_sweep.csv").string(), sweep_csv(r));
    std::string curve;
    for (std::size_t i = 0; i < lambdas.size(); ++i) curve += (i ? " " : "") + f3(r.m_mean[i]);
    const bool ok = r.m_mean.front() < 0.3 && r.m_mean.back() > 0.9 && monotone;
    return {ok, "M over lambda 0.05..4: " + curve + (monotone ? ", monotone within 1 sigma" : ", NOT monotone")};
}

Outcome boltzmann() {
    IsingProblem p(3);
    p.add_coupling(0, 1, -1.0);
    p.add_coupling(1, 2, 0.5);
    p.add_coupling(0, 2, -0.3);
    p.set_field(0, 0.2);
    p.set_field(2, -0.4);
    const std::size_t sweeps = 1000000, batches = 1000, per_batch = sweeps / batches;
    double worst_z = 0.0;
    for (double t : {0.5, 1.0, 2.0}) {
        std::vector<double> w(8);
        double z = 0.0;
        for (std::size_t k = 0; k < 8; ++k) {
            SpinState s(3, 1);
            for (std::size_t i = 0; i < 3; ++i) s.set(i, (k >> i) & 1 ? 1 : -1);
            w[k] = std::exp(-energy(p, s) / t);
            z += w[k];
        }
        SpinState s(3, 1);
        Rng rng(derive_seed(303, static_cast<std::uint64_t>(t * 4)));
        std::vector<std::size_t> order;
        double e = energy(p, s);
        for (int k = 0; k < 1000; ++k) metropolis_sweep(p, s, t, rng, order, e);
        // frequencies per batch of 1000 sweeps
        std::vector<std::vector<double>> freq(8, std::vector<double>(batches, 0.0));
        for (std::size_t b = 0; b < batches; ++b) {
            for (std::size_t k = 0; k < per_batch; ++k) {
                metropolis_sweep(p, s, t, rng, order, e);
                std::size_t idx = 0;
                for (std::size_t i = 0; i < 3; ++i) idx |= static_cast<std::size_t>(s[i] > 0) << i;
                freq[idx][b] += 1.0 / per_batch;
            }
        }
        for (std::size_t k = 0; k < 8; ++k) {
            double mean = 0.0, ss = 0.0;
            for (double f : freq[k]) mean += f / batches;
            for (double f : freq[k]) ss += (f - mean) * (f - mean);
            const double sigma = std::sqrt(ss / (batches - 1) / batches);
            const double exact = w[k] / z;
            worst_z = std::max(worst_z, std::abs(mean - exact) / std::max(sigma, 1e-12));
        }
    }
    return {worst_z < 3.0, "T in {0.5,1,2}, 1e6 sweeps each, largest deviation " + f3(worst_z) + " sigma"};
}

Outcome gradient_fidelity() {
    Rng rng(606);
    double worst = 0.0;
    for (const auto& p : {Potential::u1(0.5), Potential::u2(10), Potential::u3(1.7)}) {
        const auto& b = p.bounds();
        for (int k = 0; k < 100; ++k) {
            const Point x{b.phi_lo + rng.uniform() * (b.phi_hi - b.phi_lo),
                          b.psi_lo + rng.uniform() * (b.psi_hi - b.psi_lo)};
            const double h = 1e-5;
            const Point g = p.grad(x);
            const double fx = (p.eval(x.phi + h, x.psi) - p.eval(x.phi - h, x.psi)) / (2 * h);
            const double fy = (p.eval(x.phi, x.psi + h) - p.eval(x.phi, x.psi - h)) / (2 * h);
            worst = std::max(worst, std::abs(g.phi - fx) / std::max(1.0, std::abs(fx)));
            worst = std::max(worst, std::abs(g.psi - fy) / std::max(1.0, std::abs(fy)));
        }
    }
    return {worst < 1e-5, "300 points, max relative error " + fmt(worst)};
}

/// Basin maps on the 10x10 common start grid, shared by several criteria.
struct PotentialRuns {
    double threshold = 0.0;
    std::map<Method, std::vector<RunRecord>> records;
    std::map<Method, double> success;
};

std::map<std::string, PotentialRuns> runs_cache;

const PotentialRuns& runs_for(const std::string& pot) {
    auto it = runs_cache.find(pot);
    if (it != runs_cache.end()) return it->second;
    Solver solver(accept_config(pot));
    PotentialRuns out;
    out.threshold = solver.threshold();
    const auto starts = start_grid(solver.bounds(), 10);
    std::string csv;
    for (Method m : {Method::nm, Method::gd, Method::ta, Method::qa}) {
        out.records[m] = basin_map(solver, m, starts, 2024, threads);
        out.success[m] = success_fraction(out.records[m], out.threshold);
        csv += run_records_csv(out.records[m]);
    }
    write_file((work_dir / ("basins_" + pot + ".csv")).string(), csv);
    return runs_cache.emplace(pot, std::move(out)).first->second;
}

Outcome optimizer_ordering() {
    bool ok = true;
    std::string detail;
    for (const std::string pot : {"u1", "u2", "u3"}) {
        const auto& r = runs_for(pot);
        const double qa = r.success.at(Method::qa), ta = r.success.at(Method::ta);
        const double classical = std::max(r.success.at(Method::nm), r.success.at(Method::gd));
        bool here = qa > ta && ta > classical;
        if (pot == "u1") here = here && qa - ta >= 0.10;
        ok = ok && here;
        detail += pot + ": QA " + f3(qa) + " TA " + f3(ta) + " NM " + f3(r.success.at(Method::nm)) + " GD " +
                  f3(r.success.at(Method::gd)) + "; ";
    }
    return {ok, detail + "100 common starts, success radius 2 lattice steps"};
}

Outcome lambda_scaling() {
    MethodConfig c = accept_config("u2");
    const auto starts = start_grid(make_potential(c, false).bounds(), 10);
    const auto rows = lambda_scaling_study(c, {0.5, 5.0, 10.0}, starts, 2024, threads);
    bool nondecreasing = rows[0].success <= rows[1].success && rows[1].success <= rows[2].success;

    Rng rng(808);
    double worst = 0.0;
    bool exact_pow2 = true;
    for (int k = 0; k < 100000; ++k) {
        const double de = rng.uniform() * 10 - 2, t = 0.01 + rng.uniform() * 5;
        const double c1 = std::ldexp(1.0, static_cast<int>(rng.below(21)) - 10);
        const double c2 = 0.001 + rng.uniform() * 1000;
        const double base = metropolis_acceptance(de, t);
        exact_pow2 = exact_pow2 && metropolis_acceptance(c1 * de, c1 * t) == base;
        worst = std::max(worst, std::abs(metropolis_acceptance(c2 * de, c2 * t) - base));
    }
    const bool invariant = exact_pow2 && worst < 1e-14;
    return {nondecreasing && invariant, "QA success at lambda 0.5/5/10: " + f3(rows[0].success) + " " +
                                            f3(rows[1].success) + " " + f3(rows[2].success) +
                                            "; acceptance invariance max deviation " + fmt(worst)};
}

Outcome u3_failure_mode() {
    const auto& r = runs_for("u3");
    std::map<Method, double> near;
    for (const auto& [m, recs] : r.records) near[m] = fraction_within(recs, {0, 0}, 0.2);
    const bool ok = near[Method::nm] < 0.10 && near[Method::gd] < 0.10 && near[Method::ta] > 0.30 &&
                    near[Method::qa] > 0.60;
    return {ok, "within 0.2 of the origin: NM " + f3(near[Method::nm]) + " GD " + f3(near[Method::gd]) + " TA " +
                    f3(near[Method::ta]) + " QA " + f3(near[Method::qa])};
}

int shell(const std::string& cmd) {
    const int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
    return rc == -1 ? -1 : WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Record CSV with the wall-time column dropped.
std::string without_timing(const std::string& csv) {
    std::string out;
    std::stringstream ss(csv);
    for (std::string line; std::getline(ss, line);) out += line.substr(0, line.rfind(',')) + "\n";
    return out;
}

Outcome determinism() {
    const fs::path dir = work_dir / "determinism";
    fs::create_directories(dir);
    struct Case {
        std::string name;
        std::string args;
        bool records;
    };
    const std::vector<Case> cases{
        {"ta", "basin-map --method ta --potential u1 --grid 5 --seed 31", true},
        {"qa", "basin-map --method qa --potential u2 --grid 3 --seed 32 --reads 30 --slices 16 --sweeps-per-us 5", true},
        {"nm", "basin-map --method nm --potential u3 --grid 6 --seed 33", true},
        {"gd", "basin-map --method gd --potential u1 --grid 6 --seed 34", true},
        {"sweep", "ising-sweep --mode thermal --n 12 --t 1:3:5 --seed 35", false},
        {"hist", "hist --potential u1 --methods ta --starts 4 --reps 5 --seed 36", false},
    };
    std::size_t compared = 0;
    for (const auto& c : cases) {
        const auto first = dir / (c.name + ".csv");
        const auto again = dir / (c.name + "_rerun.csv");
        if (shell(cli_path + " " + c.args + " --threads 1 -o " + first.string()) != 0) {
            return {false, c.name + ": first run failed"};
        }
        const auto manifest = first.string() + ".manifest.json";
        if (shell(cli_path + " rerun " + manifest + " -o " + again.string()) != 0) {
            return {false, c.name + ": rerun failed"};
        }
        const auto a = slurp(first), b = slurp(again);
        const bool same = c.records ? without_timing(a) == without_timing(b) : a == b;
        if (!same || a.empty()) return {false, c.name + ": rerun differs"};
        if (c.records) compared += parse_run_records_csv(a).size();
    }
    return {true, std::to_string(cases.size()) + " manifests re-run, " + std::to_string(compared) +
                      " run records identical apart from wall time"};
}

Outcome timing() {
    Solver solver(accept_config("u1"));
    const auto rows = timing_table(solver, {Method::nm, Method::gd, Method::ta, Method::qa}, 10, 2024);
    write_file((work_dir / "timing.csv").string(), timing_csv(rows));
    std::map<Method, double> mean;
    std::string detail;
    bool finite = true;
    for (const auto& r : rows) {
        mean[r.method] = r.mean_us;
        finite = finite && r.mean_us > 0 && std::isfinite(r.mean_us);
        detail += method_name(r.method) + " " + f3(r.mean_us) + "us (reference " + fmt(r.reference_us) + "us); ";
    }
    const bool ok = finite && mean[Method::ta] > mean[Method::nm] && mean[Method::ta] > mean[Method::gd];
    return {ok, detail + "TA slower than NM and GD"};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: acceptance <cli> <work dir>\n");
        return 2;
    }
    cli_path = argv[1];
    work_dir = argv[2];
    fs::create_directories(work_dir);
    threads = default_threads();

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"encoder exactness", encoder_exactness},
        {"penalty dominance", penalty_dominance},
        {"thermal Ising transition", thermal_transition},
        {"quantum-analog transition", quantum_transition},
        {"Boltzmann correctness", boltzmann},
        {"gradient fidelity", gradient_fidelity},
        {"optimizer ordering", optimizer_ordering},
        {"lambda scaling direction", lambda_scaling},
        {"U3 classical failure mode", u3_failure_mode},
        {"determinism from manifests", determinism},
        {"timing ordering", timing},
    };
    int failures = 0;
    std::string report;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failures += o.pass ? 0 : 1;
        char line[2048];
        std::snprintf(line, sizeof line, "[%s] %2zu %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1,
                      criteria[i].first.c_str(), o.detail.c_str(), secs);
        std::fputs(line, stdout);
        std::fflush(stdout);
        report += line;
    }
    const std::string summary = std::to_string(failures) + " of " + std::to_string(criteria.size()) + " criteria failed\n";
    std::fputs(summary.c_str(), stdout);
    report += summary;
    write_file((work_dir / "acceptance_report.txt").string(), report);
    return failures == 0 ? 0 : 1;
}
