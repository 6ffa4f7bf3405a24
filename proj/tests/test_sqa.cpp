#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "annealbench/sqa.hpp"

using namespace annealbench;

namespace {

// Direct double sum over slices and spins.
double reference_effective(const IsingProblem& p, const std::vector<SpinState>& sl, double a, double b, double t) {
    const std::size_t np = sl.size();
    double classical = 0.0;
    for (const auto& s : sl) {
        double e = p.offset();
        for (std::size_t i = 0; i < p.size(); ++i) {
            e += p.field(i) * s[i];
            for (std::size_t j = i + 1; j < p.size(); ++j) e += p.coupling(i, j) * s[i] * s[j];
        }
        classical += e;
    }
    double links = 0.0;
    for (std::size_t k = 0; k < np; ++k)
        for (std::size_t i = 0; i < p.size(); ++i) links += sl[k][i] * sl[(k + 1) % np][i];
    const double jp = -0.5 * t * std::log(std::tanh(a / (np * t)));
    return b / np * classical - jp * links;
}

ReadSet reads_at(const DwLayout& l, const std::vector<std::pair<std::size_t, std::size_t>>& cells,
                 const std::vector<double>& energies) {
    ReadSet rs;
    rs.layout = l;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        Read r;
        r.state = plant(l, cells[i].first, cells[i].second);
        r.energy = energies.empty() ? 0.0 : energies[i];
        r.decoded = decode(r.state, l);
        r.valid = true;
        rs.reads.push_back(r);
    }
    return rs;
}

}  // namespace

TEST_CASE("slice coupling") {
    CHECK(std::isinf(slice_coupling(0.0, 8, 0.1)));
    CHECK(slice_coupling(1.0, 8, 0.125) == doctest::Approx(0.0625 * 0.27226).epsilon(1e-4));
    CHECK(slice_coupling(1.0, 8, 0.125) == doctest::Approx(-0.0625 * std::log(std::tanh(1.0))));
    CHECK(slice_coupling(50.0, 4, 0.05) < 1e-12);
    double prev = slice_coupling(1e-6, 16, 0.05);
    for (double a = 1e-5; a < 3; a *= 1.7) {
        const double j = slice_coupling(a, 16, 0.05);
        CHECK(j > 0.0);
        CHECK(j < prev);
        prev = j;
    }
    CHECK_THROWS_AS(slice_coupling(1.0, 8, 0.0), InvalidArgument);
}

TEST_CASE("effective energy") {
    auto g = build_2d_grid({3, 1.0});
    SqaConfig cfg;
    cfg.slices = 4;
    TransverseCurves curves;
    // decoupled limit: A large
    std::vector<std::array<double, 3>> rows{{{0.0, 1000.0, 0.5}}, {{1.0, 0.0, 1.0}}};
    TransverseCurves strong(rows);
    auto s = random_state(9, 3);
    std::vector<SpinState> same(4, s);
    CHECK(effective_energy(g, same, 0.0, strong, cfg) == doctest::Approx(0.5 * energy(g, s)).epsilon(1e-9));

    Rng rng(12);
    for (int t = 0; t < 20; ++t) {
        std::vector<SpinState> sl;
        for (int k = 0; k < 4; ++k) sl.push_back(random_state(9, rng.next()));
        const double sv = 0.1 + 0.8 * rng.uniform();
        CHECK(std::abs(effective_energy(g, sl, sv, curves, cfg) -
                       reference_effective(g, sl, 1 - sv, sv, cfg.t_eff)) < 1e-12);
    }
    // one differing spin in one slice: two inter-slice links drop by 2 each
    auto other = same;
    other[1].flip(4);
    const double jp = slice_coupling(curves.a(0.5), 4, cfg.t_eff);
    const double diff = effective_energy(g, other, 0.5, curves, cfg) - effective_energy(g, same, 0.5, curves, cfg);
    const double classical = 0.5 / 4 * (energy(g, other[1]) - energy(g, s));
    CHECK(diff - classical == doctest::Approx(4 * jp));
}

TEST_CASE("schedules") {
    auto q = reverse_anneal(0.3, 100.0);
    CHECK(q.segments.size() == 3);
    CHECK(q.segments[0].duration_us == doctest::Approx(0.7));
    CHECK(q.total_us() == doctest::Approx(101.4));
    CHECK(q.s_at(0.0) == 1.0);
    CHECK(q.s_at(0.35) == doctest::Approx(0.65));
    CHECK(q.s_at(50.0) == doctest::Approx(0.3));
    CHECK(q.s_at(1000.0) == 1.0);
    QuantumSchedule fast{{{0.5, 0.3}, {10, 0.3}, {0.7, 1.0}}};
    CHECK_THROWS_AS(fast.validate(), InvalidArgument);
    QuantumSchedule bad_s{{{2.0, 1.5}}};
    CHECK_THROWS_AS(bad_s.validate(), InvalidArgument);
    QuantumSchedule zero{{{0.0, 1.0}}};
    CHECK_THROWS_AS(zero.validate(), InvalidArgument);
    for (const char* name : {"u1", "u2", "u3"}) CHECK_NOTHROW(preset_quantum_schedule(name).validate());
    CHECK(preset_quantum_schedule("u1").total_us() == doctest::Approx(365.0));
    CHECK(preset_quantum_schedule("u2").total_us() == doctest::Approx(115.0));
}

TEST_CASE("curves") {
    TransverseCurves lin;
    CHECK(lin.a(0.25) == doctest::Approx(0.75));
    CHECK(lin.b(0.25) == doctest::Approx(0.25));
    CHECK(lin.a(1.0) == 0.0);
    CHECK_THROWS_AS(TransverseCurves({{{0.0, 1.0, 0.5}}, {{1.0, 0.0, 0.2}}}), InvalidArgument);
    CHECK_THROWS_AS(TransverseCurves({{{0.0, 1.0, 0.0}}, {{1.0, 0.3, 1.0}}}), InvalidArgument);
    const auto path = (std::filesystem::temp_directory_path() / "annealbench_curves.csv").string();
    {
        std::ofstream f(path);
        f << "s,A,B\n0,2,0\n0.5,0.5,0.4\n1,0,1\n";
    }
    auto c = load_curves_csv(path);
    CHECK(c.a(0.25) == doctest::Approx(1.25));
    CHECK(c.b(0.75) == doctest::Approx(0.7));
    std::filesystem::remove(path);
}

TEST_CASE("readout") {
    Rng rng(1);
    auto a = random_state(10, 5);
    CHECK(readout({a, a, a}, rng) == a);
    SpinState up(1, 1), down(1, -1);
    CHECK(readout({up, up, down}, rng)[0] == 1);
    Rng r1(9), r2(9);
    CHECK(readout({up, down}, r1) == readout({up, down}, r2));
}

TEST_CASE("held at s = 1 the read equals a local-minimum init") {
    auto g = build_2d_grid({4, 1.0});
    SqaConfig cfg;
    cfg.slices = 4;
    cfg.num_reads = 5;
    QuantumSchedule hold{{{20.0, 1.0}}};
    auto rs = sqa_run(g, hold, TransverseCurves{}, cfg, SpinState(16, 1));
    for (const auto& r : rs.reads) CHECK(r.state == SpinState(16, 1));
}

TEST_CASE("2x2 grid relaxes to the ground state") {
    auto g = build_2d_grid({2, 2.0});
    SqaConfig cfg;
    cfg.num_reads = 100;
    cfg.seed = 5;
    // excited: checkerboard
    SpinState excited(std::vector<std::int8_t>{1, -1, -1, 1});
    auto rs = sqa_run(g, reverse_anneal(0.3, 100.0, 0.0, 10.0), TransverseCurves{}, cfg, excited);
    std::size_t ground = 0;
    for (const auto& r : rs.reads) ground += r.energy == -8.0;
    CHECK(ground >= 95);
}

TEST_CASE("locked slices reproduce Boltzmann weights") {
    IsingProblem p(3);
    p.add_coupling(0, 1, -0.05);
    p.add_coupling(1, 2, 0.03);
    p.set_field(0, 0.02);
    const double t = 0.05;
    std::vector<double> w(8);
    double z = 0.0;
    for (std::size_t k = 0; k < 8; ++k) {
        std::vector<std::int8_t> v(3);
        for (std::size_t i = 0; i < 3; ++i) v[i] = (k >> i) & 1 ? 1 : -1;
        w[k] = std::exp(-energy(p, SpinState(v)) / t);
        z += w[k];
    }
    SqaConfig cfg;
    cfg.slices = 4;
    cfg.t_eff = t;
    cfg.sweeps_per_us = 1;
    std::vector<double> count(8, 0.0);
    const std::size_t reads = 20000;
    for (std::size_t r = 0; r < reads; ++r) {
        auto s = sqa_single_read(p, QuantumSchedule{{{50.0, 1.0}}}, TransverseCurves{}, cfg, SpinState(3, 1), r + 1);
        std::size_t k = 0;
        for (std::size_t i = 0; i < 3; ++i) k |= static_cast<std::size_t>(s[i] > 0) << i;
        count[k] += 1;
    }
    for (std::size_t k = 0; k < 8; ++k) CHECK(std::abs(count[k] / reads - w[k] / z) < 0.02);
}

TEST_CASE("seeded determinism") {
    auto g = build_2d_grid({4, 0.5});
    SqaConfig cfg;
    cfg.slices = 8;
    cfg.num_reads = 3;
    cfg.seed = 42;
    auto a = sqa_run(g, reverse_anneal(0.3, 5.0), TransverseCurves{}, cfg, random_state(16, 1));
    auto b = sqa_run(g, reverse_anneal(0.3, 5.0), TransverseCurves{}, cfg, random_state(16, 1));
    for (std::size_t i = 0; i < 3; ++i) CHECK(a.reads[i].state == b.reads[i].state);
}

TEST_CASE("mode of reads") {
    auto l = layout_for_bounds(6, {0, 1, 0, 1}, 1, 1);
    auto same = reads_at(l, {{2, 3}, {2, 3}, {2, 3}}, {});
    auto m = mode_of_reads(same, l);
    CHECK(m.k_phi == 2);
    CHECK(m.k_psi == 3);
    CHECK(m.phi == l.value(Axis::phi, 2));

    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (int i = 0; i < 60; ++i) cells.push_back({1, 1});
    for (int i = 0; i < 40; ++i) cells.push_back({4, 5});
    auto maj = mode_of_reads(reads_at(l, cells, {}), l);
    CHECK(maj.k_phi == 1);

    // tie between two clusters: lower energy wins
    auto tie = reads_at(l, {{1, 1}, {1, 1}, {3, 3}, {3, 3}, {5, 2}}, {0.0, 0.0, -1.0, 0.5, -5.0});
    auto t = mode_of_reads(tie, l);
    CHECK(t.k_phi == 3);
    CHECK(t.k_psi == 3);

    ReadSet none;
    Read bad;
    bad.state = SpinState(12, 1);
    bad.valid = false;
    none.reads.push_back(bad);
    CHECK_THROWS_AS(mode_of_reads(none, l), NoValidReads);

    const auto csv = reads_csv(tie);
    CHECK(csv.rfind("read_index,valid,phi,psi,energy\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("config validation") {
    SqaConfig c;
    c.slices = 1;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.t_eff = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.sweeps_per_us = 0.5;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
}
