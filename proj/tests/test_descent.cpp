#include "doctest.h"

#include <cmath>

#include "annealbench/descent.hpp"

using namespace annealbench;

namespace {

Objective bowl() {
    return {[](Point x) { return x.phi * x.phi + x.psi * x.psi; },
            [](Point x) { return Point{2 * x.phi, 2 * x.psi}; }};
}

Objective ellipse() {
    return {[](Point x) { return 0.5 * (x.phi * x.phi + 4 * x.psi * x.psi); },
            [](Point x) { return Point{x.phi, 4 * x.psi}; }};
}

double norm(Point p) { return std::hypot(p.phi, p.psi); }

}  // namespace

TEST_CASE("Nelder-Mead on a bowl") {
    auto r = nelder_mead(bowl(), {2, 2});
    CHECK(norm(r.point) < 1e-4);
    CHECK(r.iterations < 200);
}

TEST_CASE("single reflection") {
    auto f = bowl();
    std::array<Vertex, 3> s{Vertex{{0, 0}, 0}, Vertex{{1, 0}, 1}, Vertex{{0, 1}, 1}};
    order_simplex(s);
    // equal worst values: the lower index (1,0) counts as worst
    CHECK(s[0].x.phi == 0.0);
    CHECK(s[2].x.phi == 1.0);
    CHECK(s[2].x.psi == 0.0);
    // centroid (0, 0.5); reflection (-1, 1) has f = 2 >= f(second worst) -> contraction
    const NmParams prm;
    const auto step = nelder_mead_step(f, s, prm);
    CHECK(step == NmStep::contract);
    CHECK(s[2].x.phi == doctest::Approx(0.5));
    CHECK(s[2].x.psi == doctest::Approx(0.25));
}

TEST_CASE("expansion keeps the better point") {
    Objective lin{[](Point x) { return x.phi; }, [](Point) { return Point{1, 0}; }};
    std::array<Vertex, 3> s{Vertex{{0, 0}, 0}, Vertex{{0, 1}, 0}, Vertex{{1, 0}, 1}};
    order_simplex(s);
    const auto step = nelder_mead_step(lin, s, NmParams{});
    CHECK(step == NmStep::expand);
    // x_c = (0, 0.5), x_R = (-1, 1), x_E = (-2, 1.5)
    CHECK(s[2].x.phi == doctest::Approx(-2.0));
    CHECK(s[2].x.psi == doctest::Approx(1.5));
}

TEST_CASE("simplex ordering and best value") {
    auto f = objective_of(Potential::u1(0.5));
    std::array<Vertex, 3> s{Vertex{{1.3, -0.7}, 0}, Vertex{{1.8, -0.7}, 0}, Vertex{{1.3, -0.2}, 0}};
    for (auto& v : s) v.f = f.value(v.x);
    order_simplex(s);
    double best = s[0].f;
    Point best_x = s[0].x;
    for (int it = 0; it < 200; ++it) {
        const auto step = nelder_mead_step(f, s, NmParams{});
        if (step == NmStep::shrink) {
            CHECK(s[0].x.phi == best_x.phi);
            CHECK(s[0].x.psi == best_x.psi);
        }
        order_simplex(s);
        CHECK(s[0].f <= s[1].f);
        CHECK(s[1].f <= s[2].f);
        CHECK(s[0].f <= best);
        best = s[0].f;
        best_x = s[0].x;
    }
}

TEST_CASE("Nelder-Mead trapping and determinism on U1") {
    const auto u1 = Potential::u1(0.5);
    const auto truth = true_minimum(u1);
    const auto minima = local_minima(u1);
    // start next to a non-global interior minimum
    Point trap{};
    for (const auto& m : minima) {
        if (distance_to_truth(truth, m.argmin) > 1.0 && std::abs(m.argmin.phi) < 2.5 && std::abs(m.argmin.psi) < 2.5) {
            trap = m.argmin;
            break;
        }
    }
    auto r = nelder_mead(objective_of(u1), {trap.phi + 0.05, trap.psi - 0.05});
    CHECK(distance_to_truth(truth, r.point) > 0.5);
    auto again = nelder_mead(objective_of(u1), {trap.phi + 0.05, trap.psi - 0.05});
    CHECK(again.point.phi == r.point.phi);
    CHECK(again.point.psi == r.point.psi);
}

TEST_CASE("NM parameter validation and non-finite values") {
    NmParams p;
    p.gamma = 1.0;
    CHECK_THROWS_AS(nelder_mead(bowl(), {0, 0}, p), InvalidArgument);
    p = {};
    p.beta = 0.6;
    CHECK_THROWS_AS(nelder_mead(bowl(), {0, 0}, p), InvalidArgument);
    Objective bad{[](Point x) { return x.phi > 0.2 ? std::nan("") : x.phi; }, nullptr};
    CHECK_THROWS_AS(nelder_mead(bad, {0, 0}), OptimizerError);
}

TEST_CASE("conjugate gradient on a quadratic") {
    CgParams p;
    p.max_step_length = 1e9;
    auto r = conjugate_gd(ellipse(), {4, 1}, p);
    CHECK(r.grad_norm < 1e-8);
    CHECK(r.iterations <= 50);
    CHECK(r.stop_reason == "gradient");
    auto capped = conjugate_gd(ellipse(), {4, 1});
    CHECK(capped.grad_norm < 1e-8);
}

TEST_CASE("beta none is steepest descent") {
    CgParams p;
    p.beta = CgBeta::none;
    p.max_iters = 3;
    p.max_step_length = 1e9;
    auto f = ellipse();
    auto r = conjugate_gd(f, {4, 1}, p);
    // replay by hand: x <- x - alpha g with Armijo backtracking from 1
    Point x{4, 1};
    for (std::size_t k = 0; k < r.iterations; ++k) {
        const Point g = f.gradient(x);
        double a = 1.0;
        for (;;) {
            const Point y{x.phi - a * g.phi, x.psi - a * g.psi};
            if (f.value(y) <= f.value(x) - 1e-4 * a * (g.phi * g.phi + g.psi * g.psi)) {
                x = y;
                break;
            }
            a *= 0.5;
        }
        CHECK(r.step_sizes[k] == a);
    }
    CHECK(r.point.phi == x.phi);
    CHECK(r.point.psi == x.psi);
}

TEST_CASE("Armijo condition on every step") {
    const auto u1 = Potential::u1(0.5);
    auto f = objective_of(u1);
    CgParams p;
    p.clamp = u1.bounds();
    p.max_step_length = 1e9;
    auto r = conjugate_gd(f, {0.3, -1.1}, p);
    CHECK(r.iterations > 0);
    for (double a : r.step_sizes) CHECK(a > 0.0);
    CHECK(r.value <= u1.eval(0.3, -1.1));
}

TEST_CASE("linear objective stops on the clamp") {
    Objective lin{[](Point x) { return x.phi + 2 * x.psi; }, [](Point) { return Point{1, 2}; }};
    CgParams p;
    p.clamp = Bounds{-1, 1, -2, 2};
    auto r = conjugate_gd(lin, {0.5, 0.5}, p);
    CHECK(r.point.phi == -1.0);
    CHECK(r.point.psi == -2.0);
    CHECK(r.stop_reason == "gradient");
}

TEST_CASE("U3 plateau starts run outward") {
    const auto u3 = Potential::u3(1.7);
    CgParams p;
    p.clamp = u3.bounds();
    auto r = conjugate_gd(objective_of(u3), {1.0, 0.8}, p);
    CHECK(std::hypot(r.point.phi, r.point.psi) > 1.5);
    auto nm = nelder_mead(objective_of(u3), {1.0, 0.8});
    CHECK(std::hypot(nm.point.phi, nm.point.psi) > 1.5);
}

TEST_CASE("non-finite gradient aborts") {
    Objective bad{[](Point) { return 0.0; }, [](Point) { return Point{std::nan(""), 0}; }};
    CHECK_THROWS_AS(conjugate_gd(bad, {0, 0}), OptimizerError);
}
