#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "annealbench/csv.hpp"
#include "annealbench/harness.hpp"

using namespace annealbench;
namespace fs = std::filesystem;

namespace {

/// Exit status when a QA run produced no faithful read.
struct NoResult : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// "lo:hi:count", a comma list, or a single value.
std::vector<double> parse_axis(const std::string& text) {
    auto number = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size() || !std::isfinite(v)) {
                throw std::invalid_argument(s);
            }
            return v;
        } catch (const std::exception&) {
            throw InvalidArgument("bad number '" + s + "' in axis '" + text + "'");
        }
    };
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) {
            parts.push_back(p);
        }
        if (parts.size() != 3) {
            throw InvalidArgument("range '" + text + "' must look like lo:hi:count");
        }
        const double lo = number(parts[0]);
        const double hi = number(parts[1]);
        const double c = number(parts[2]);
        if (c < 1 || c != std::floor(c)) {
            throw InvalidArgument("range count must be a positive integer in '" + text + "'");
        }
        const auto count = static_cast<std::size_t>(c);
        for (std::size_t i = 0; i < count; ++i) {
            out.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
        }
        return out;
    }
    for (const auto& p : split_csv_line(text)) {
        out.push_back(number(p));
    }
    if (out.empty()) {
        throw InvalidArgument("empty axis");
    }
    return out;
}

Point parse_point(const std::string& text) {
    const auto v = parse_axis(text);
    if (v.size() != 2) {
        throw InvalidArgument("expected phi,psi but got '" + text + "'");
    }
    return {v[0], v[1]};
}

/// Options shared by every command that builds a potential and its solvers.
struct ProblemOptions {
    std::string potential = "u1";
    std::optional<double> lambda;
    std::optional<double> lambda_quantum;
    std::size_t n = 20;
    bool literal_sign = false;
    std::string bounds;
    std::string encode = "h";
    std::string schedule;
    std::string qschedule;
    std::string curves;
    double decay = 0.05;
    std::size_t slices = 32;
    double t_eff = 0.05;
    double sweeps_per_us = 10.0;
    std::size_t reads = 100;

    void attach(CLI::App* app, bool lambda_means_quantum = false) {
        app->add_option("--potential", potential, "u1, u2, u3 or custom:<csv>");
        app->add_option("--lambda", lambda,
                        lambda_means_quantum ? "potential scale for QA" : "classical potential scale");
        app->add_option("--lambda-quantum", lambda_quantum, "potential scale used by QA");
        app->add_option("--n", n, "spins per domain-wall block")->check(CLI::Range(4, 100000));
        app->add_flag("--u2-literal-sign", literal_sign, "use bumps instead of holes in u2");
        app->add_option("--bounds", bounds, "phi_lo,phi_hi,psi_lo,psi_hi");
        app->add_option("--encode", encode, "h or j")->check(CLI::IsMember({"h", "j"}));
        app->add_option("--schedule", schedule, "thermal preset name or iterations,temperature CSV");
        app->add_option("--decay", decay, "decay rate for the named thermal presets");
        app->add_option("--qschedule", qschedule, "quantum preset name or duration_us,s CSV");
        app->add_option("--curves", curves, "s,A,B CSV of transverse and problem curves");
        app->add_option("--slices", slices, "Trotter slices")->check(CLI::PositiveNumber);
        app->add_option("--t-eff", t_eff, "emulator temperature")->check(CLI::PositiveNumber);
        app->add_option("--sweeps-per-us", sweeps_per_us, "emulator sweeps per microsecond")
            ->check(CLI::PositiveNumber);
        app->add_option("--reads", reads, "QA reads per run")->check(CLI::PositiveNumber);
        lambda_quantum_default_ = lambda_means_quantum;
    }

    MethodConfig build() const {
        std::string base = potential.rfind("custom:", 0) == 0 ? "custom" : potential;
        MethodConfig c = preset_config(base);
        c.potential = potential;
        c.u2_literal_sign = literal_sign;
        if (lambda) {
            (lambda_quantum_default_ ? c.lambda_quantum : c.lambda_classical) = *lambda;
        }
        if (lambda_quantum) {
            c.lambda_quantum = *lambda_quantum;
        }
        if (!bounds.empty()) {
            const auto v = parse_axis(bounds);
            if (v.size() != 4) {
                throw InvalidArgument("--bounds needs four numbers");
            }
            c.bounds = Bounds{v[0], v[1], v[2], v[3]};
        }
        c.n = n;
        c.encode_mode = encode == "j" ? EncodeMode::j_linear : EncodeMode::h_linear;
        if (!schedule.empty()) {
            c.thermal = fs::exists(schedule) ? load_thermal_csv(schedule) : preset_schedule(schedule, decay);
        }
        if (!qschedule.empty()) {
            c.quantum = fs::exists(qschedule) ? load_quantum_csv(qschedule) : preset_quantum_schedule(qschedule);
        }
        if (!curves.empty()) {
            c.curves = load_curves_csv(curves);
        }
        c.sqa.slices = slices;
        c.sqa.t_eff = t_eff;
        c.sqa.sweeps_per_us = sweeps_per_us;
        c.sqa.num_reads = reads;
        c.thermal.validate();
        c.quantum.validate();
        c.sqa.validate();
        return c;
    }

private:
    bool lambda_quantum_default_ = false;
};

struct Context {
    std::vector<std::string> args;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    std::string output;

    std::size_t workers() const { return threads ? threads : default_threads(); }

    /// Writes <output>.manifest.json holding the arguments that reproduce the output.
    void manifest(const std::string& command, const nlohmann::json& config) const {
        nlohmann::json m;
        m["command"] = command;
        m["args"] = args;
        m["seed"] = seed;
        m["output"] = output;
        m["config"] = config;
        write_file(output + ".manifest.json", m.dump(2) + "\n");
    }
};

void add_common(CLI::App* app, Context& ctx, const std::string& default_output) {
    ctx.output = default_output;
    app->add_option("--seed", ctx.seed, "master seed");
    app->add_option("--threads", ctx.threads, "worker threads (default: ANNEALBENCH_THREADS or all cores)");
    app->add_option("-o,--output", ctx.output, "output path")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

nlohmann::json record_json(const RunRecord& r) {
    return {{"method", r.method},       {"potential", r.potential},   {"phi_start", r.start.phi},
            {"psi_start", r.start.psi}, {"phi_out", r.result.phi},    {"psi_out", r.result.psi},
            {"delta", r.delta},         {"energy", r.energy},         {"valid", r.valid},
            {"seed", r.seed},           {"wall_time_us", r.wall_time_us}};
}

int run(int argc, char** argv);

/// Re-executes the arguments stored in a manifest, writing to a new output path.
int rerun(const std::string& manifest_path, const std::string& output) {
    std::ifstream in(manifest_path);
    if (!in) {
        throw InvalidArgument("cannot open manifest '" + manifest_path + "'");
    }
    nlohmann::json m;
    try {
        in >> m;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("manifest is not JSON: " + std::string(e.what()));
    }
    std::vector<std::string> args{"annealbench"};
    for (const auto& a : m.at("args")) {
        args.push_back(a.get<std::string>());
    }
    if (!output.empty()) {
        args.push_back("--output");
        args.push_back(output);
    }
    std::vector<char*> ptrs;
    for (auto& a : args) {
        ptrs.push_back(a.data());
    }
    return run(static_cast<int>(ptrs.size()), ptrs.data());
}

int run(int argc, char** argv) {
    CLI::App app{"Domain-wall Ising encodings and optimizer benchmarks"};
    app.require_subcommand(1);
    Context ctx;
    for (int i = 1; i < argc; ++i) {
        ctx.args.emplace_back(argv[i]);
    }

    // ising-sweep
    auto* sweep = app.add_subcommand("ising-sweep", "magnetisation and energy of a periodic grid across an axis");
    std::string mode = "thermal";
    std::size_t grid_n = 0;
    std::string lambda_axis = "1";
    std::string t_axis = "0.5:4:8";
    double s_hold = 0.3;
    ThermalProtocol protocol;
    std::string start_mode = "random";
    QuantumSweepOptions qopt;
    std::string svg_path;
    std::string curves_path;
    sweep->add_option("--mode", mode, "thermal or quantum")->check(CLI::IsMember({"thermal", "quantum"}));
    sweep->add_option("--n", grid_n, "grid side")->required()->check(CLI::Range(2, 100000));
    sweep->add_option("--lambda", lambda_axis, "coupling; an axis in quantum mode");
    sweep->add_option("--t", t_axis, "temperature axis for thermal mode");
    sweep->add_option("--s", s_hold, "anneal parameter held in quantum mode")->check(CLI::Range(0.0, 1.0));
    sweep->add_option("--hold", qopt.hold_us, "hold duration in microseconds");
    sweep->add_option("--equilibrate", protocol.equilibrate, "sweeps before measuring");
    sweep->add_option("--measure", protocol.measure, "measured sweeps");
    sweep->add_option("--reps", protocol.repetitions, "runs per temperature or reads per lambda")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--start", start_mode, "random, ordered or ladder")
        ->check(CLI::IsMember({"random", "ordered", "ladder"}));
    sweep->add_option("--slices", qopt.sqa.slices, "Trotter slices")->check(CLI::PositiveNumber);
    sweep->add_option("--t-eff", qopt.sqa.t_eff, "emulator temperature")->check(CLI::PositiveNumber);
    sweep->add_option("--sweeps-per-us", qopt.sqa.sweeps_per_us, "emulator sweeps per microsecond")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--curves", curves_path, "s,A,B CSV");
    sweep->add_option("--svg", svg_path, "also write a line chart");
    add_common(sweep, ctx, "ising_sweep.csv");

    // solve
    auto* solve = app.add_subcommand("solve", "one optimization run, printed as JSON");
    ProblemOptions solve_opts;
    std::string method_text;
    std::string start_text = "0,0";
    std::string reads_out;
    solve->add_option("--method", method_text, "nm, gd, ta or qa")->required();
    solve->add_option("--start", start_text, "phi,psi");
    solve->add_option("--reads-out", reads_out, "reads CSV for qa (default: <output>)");
    solve_opts.attach(solve, false);
    add_common(solve, ctx, "reads.csv");

    // basin-map
    auto* basin = app.add_subcommand("basin-map", "one run per start on a uniform grid");
    ProblemOptions basin_opts;
    std::size_t side = 50;
    std::string basin_svg_path;
    basin->add_option("--method", method_text, "nm, gd, ta or qa")->required();
    basin->add_option("--grid", side, "starts per side")->check(CLI::PositiveNumber);
    basin->add_option("--svg", basin_svg_path, "also write a heatmap of delta");
    basin_opts.attach(basin, false);
    add_common(basin, ctx, "basin_map.csv");

    // hist
    auto* hist = app.add_subcommand("hist", "per-start distance distributions over repeated runs");
    ProblemOptions hist_opts;
    std::string methods_text = "nm,gd,ta,qa";
    std::size_t hist_starts = 4;
    std::size_t reps = 100;
    std::size_t bins = 30;
    hist->add_option("--methods", methods_text, "comma list of methods");
    hist->add_option("--starts", hist_starts, "start grid has this many points (a square number)")
        ->check(CLI::PositiveNumber);
    hist->add_option("--reps", reps, "runs per start")->check(CLI::PositiveNumber);
    hist->add_option("--bins", bins, "histogram bins")->check(CLI::PositiveNumber);
    hist_opts.attach(hist, false);
    add_common(hist, ctx, "histograms.csv");

    // export
    auto* exp = app.add_subcommand("export", "write the encoded Ising problem as JSON");
    ProblemOptions exp_opts;
    exp_opts.attach(exp, true);
    bool exp_quantum = true;
    exp->add_flag("!--classical", exp_quantum, "encode at the classical scale");
    add_common(exp, ctx, "problem.json");

    // timing
    auto* timing = app.add_subcommand("timing", "mean wall time per run for each method");
    ProblemOptions timing_opts;
    std::size_t timing_reps = 10;
    timing->add_option("--methods", methods_text, "comma list of methods");
    timing->add_option("--reps", timing_reps, "runs per method (at least 10)");
    timing_opts.attach(timing, false);
    add_common(timing, ctx, "timing.csv");

    // study
    auto* study = app.add_subcommand("study", "QA success against lambda, or success against block length");
    ProblemOptions study_opts;
    std::string kind = "lambda";
    std::string study_axis = "0.5,5,10";
    std::size_t study_side = 10;
    study->add_option("--kind", kind, "lambda or grid-size")->check(CLI::IsMember({"lambda", "grid-size"}));
    study->add_option("--values", study_axis, "lambda values or block lengths");
    study->add_option("--methods", methods_text, "methods for grid-size");
    study->add_option("--grid", study_side, "starts per side")->check(CLI::PositiveNumber);
    study_opts.attach(study, false);
    add_common(study, ctx, "study.csv");

    // rerun
    auto* re = app.add_subcommand("rerun", "repeat a run recorded in a manifest");
    std::string manifest_path;
    std::string rerun_output;
    re->add_option("manifest", manifest_path, "manifest JSON")->required();
    re->add_option("-o,--output", rerun_output, "new output path (default: the recorded one)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        std::cerr << "error: " << e.what() << "\n\n";
        const CLI::App* scope = &app;
        for (const auto* sub : app.get_subcommands({})) {
            if (sub->parsed()) {
                scope = sub;
            }
        }
        std::cerr << scope->help();
        return 2;
    }

    if (re->parsed()) {
        return rerun(manifest_path, rerun_output);
    }

    if (sweep->parsed()) {
        const SweepStart start = parse_sweep_start(start_mode);
        SweepResult r;
        nlohmann::json config{{"mode", mode}, {"n", grid_n}, {"start", start_mode}};
        if (mode == "thermal") {
            const auto lambdas = parse_axis(lambda_axis);
            if (lambdas.size() != 1) {
                throw InvalidArgument("thermal mode takes a single --lambda");
            }
            const auto temps = parse_axis(t_axis);
            protocol.start = start;
            config["lambda"] = lambdas[0];
            config["temperatures"] = temps;
            config["equilibrate"] = protocol.equilibrate;
            config["measure"] = protocol.measure;
            config["repetitions"] = protocol.repetitions;
            r = ising_thermal_sweep(grid_n, lambdas[0], temps, protocol, ctx.seed, ctx.workers());
        } else {
            const auto lambdas = parse_axis(lambda_axis);
            qopt.s_hold = s_hold;
            qopt.reads = protocol.repetitions;
            qopt.start = start;
            if (!curves_path.empty()) {
                qopt.curves = load_curves_csv(curves_path);
            }
            qopt.sqa.validate();
            config["lambdas"] = lambdas;
            config["s_hold"] = s_hold;
            config["hold_us"] = qopt.hold_us;
            config["reads"] = qopt.reads;
            config["slices"] = qopt.sqa.slices;
            config["t_eff"] = qopt.sqa.t_eff;
            config["sweeps_per_us"] = qopt.sqa.sweeps_per_us;
            r = ising_lambda_sweep(grid_n, lambdas, qopt, ctx.seed, ctx.workers());
        }
        write_file(ctx.output, sweep_csv(r));
        if (!svg_path.empty()) {
            write_file(svg_path, sweep_svg(r, mode + " sweep, n=" + std::to_string(grid_n)));
        }
        ctx.manifest("ising-sweep", config);
        return 0;
    }

    if (solve->parsed()) {
        const Method m = parse_method(method_text);
        const MethodConfig c = solve_opts.build();
        const Point start = parse_point(start_text);
        Solver solver(c);
        RunRecord rec;
        if (m == Method::qa) {
            ReadSet reads;
            rec = solver.run_qa(start, ctx.seed, &reads);
            write_file(reads_out.empty() ? ctx.output : reads_out, reads_csv(reads));
            ctx.manifest("solve", config_to_json(c));
        } else {
            rec = solver.run(m, start, ctx.seed);
        }
        std::cout << record_json(rec).dump() << "\n";
        if (!rec.valid) {
            throw NoResult("no valid result");
        }
        return 0;
    }

    if (basin->parsed()) {
        const Method m = parse_method(method_text);
        const MethodConfig c = basin_opts.build();
        Solver solver(c);
        const auto recs = basin_map(solver, m, start_grid(solver.bounds(), side), ctx.seed, ctx.workers());
        write_file(ctx.output, run_records_csv(recs));
        if (!basin_svg_path.empty()) {
            write_file(basin_svg_path, basin_svg(recs, side, method_name(m) + " on " + c.potential));
        }
        auto config = config_to_json(c);
        config["method"] = method_name(m);
        config["grid"] = side;
        ctx.manifest("basin-map", config);
        std::cerr << method_name(m) << " success " << success_fraction(recs, solver.threshold()) << " over "
                  << recs.size() << " starts\n";
        return 0;
    }

    if (hist->parsed()) {
        const auto methods = parse_methods(methods_text);
        const MethodConfig c = hist_opts.build();
        const auto per_side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(hist_starts))));
        if (per_side * per_side != hist_starts) {
            throw InvalidArgument("--starts must be a square number");
        }
        Solver solver(c);
        const auto starts = start_grid(solver.bounds(), per_side);
        std::vector<StartDistribution> all;
        for (Method m : methods) {
            auto d = distance_histograms(solver, m, starts, reps, ctx.seed, ctx.workers());
            all.insert(all.end(), d.begin(), d.end());
        }
        const auto& b = solver.bounds();
        const double diag = std::hypot(b.phi_hi - b.phi_lo, b.psi_hi - b.psi_lo);
        write_file(ctx.output, histograms_csv(all, diag, bins));
        auto config = config_to_json(c);
        config["methods"] = methods_text;
        config["starts"] = hist_starts;
        config["reps"] = reps;
        ctx.manifest("hist", config);
        return 0;
    }

    if (exp->parsed()) {
        const MethodConfig c = exp_opts.build();
        Solver solver(c);
        auto j = to_json(solver.problem(exp_quantum));
        j["encoding"] = layout_to_json(solver.layout(exp_quantum));
        write_file(ctx.output, j.dump(1) + "\n");
        ctx.manifest("export", config_to_json(c));
        return 0;
    }

    if (timing->parsed()) {
        const auto methods = parse_methods(methods_text);
        const MethodConfig c = timing_opts.build();
        Solver solver(c);
        const auto rows = timing_table(solver, methods, timing_reps, ctx.seed);
        write_file(ctx.output, timing_csv(rows));
        std::cout << timing_csv(rows);
        ctx.manifest("timing", config_to_json(c));
        return 0;
    }

    if (study->parsed()) {
        const MethodConfig c = study_opts.build();
        const auto values = parse_axis(study_axis);
        const auto starts = start_grid(c.bounds.value_or(make_potential(c, false).bounds()), study_side);
        std::vector<StudyRow> rows;
        if (kind == "lambda") {
            rows = lambda_scaling_study(c, values, starts, ctx.seed, ctx.workers());
        } else {
            std::vector<std::size_t> ns;
            for (double v : values) {
                if (v < 1 || v != std::floor(v)) {
                    throw InvalidArgument("block lengths must be positive integers");
                }
                ns.push_back(static_cast<std::size_t>(v));
            }
            rows = grid_size_study(c, ns, parse_methods(methods_text), starts, ctx.seed, ctx.workers());
        }
        std::string csv = kind == "lambda" ? "lambda,method,success,runs\n" : "n,method,success,runs\n";
        for (const auto& r : rows) {
            csv += fmt(r.parameter) + "," + method_name(r.method) + "," + fmt(r.success) + "," +
                   std::to_string(r.runs) + "\n";
        }
        write_file(ctx.output, csv);
        auto config = config_to_json(c);
        config["kind"] = kind;
        config["values"] = values;
        ctx.manifest("study", config);
        return 0;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NoResult& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NoValidReads& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
