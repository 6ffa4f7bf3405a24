#include "annealbench/descent.hpp"

#include <algorithm>
#include <cmath>

namespace annealbench {

Objective objective_of(const Potential& p) {
    return {[p](Point x) { return p.eval(x); }, [p](Point x) { return p.grad(x); }};
}

void NmParams::validate() const {
    if (!(alpha > 0.0) || !(gamma > 1.0) || !(beta > 0.0 && beta <= 0.5) || !(sigma > 0.0 && sigma < 1.0)) {
        throw InvalidArgument("Nelder-Mead needs alpha > 0, gamma > 1, 0 < beta <= 0.5, 0 < sigma < 1");
    }
    if (!(stddev_tol >= 0.0) || !(initial_edge > 0.0)) {
        throw InvalidArgument("Nelder-Mead needs stddev_tol >= 0 and a positive initial edge");
    }
}

namespace {

double checked(const Objective& f, Point x) {
    const double v = f.value(x);
    if (!std::isfinite(v)) {
        throw OptimizerError("objective is not finite at (" + std::to_string(x.phi) + ", " + std::to_string(x.psi) +
                             ")");
    }
    return v;
}

Point add(Point a, Point b, double t) { return {a.phi + t * b.phi, a.psi + t * b.psi}; }
Point sub(Point a, Point b) { return {a.phi - b.phi, a.psi - b.psi}; }
double dot(Point a, Point b) { return a.phi * b.phi + a.psi * b.psi; }

double value_stddev(const std::array<Vertex, 3>& s) {
    const double mean = (s[0].f + s[1].f + s[2].f) / 3.0;
    double acc = 0.0;
    for (const auto& v : s) {
        acc += (v.f - mean) * (v.f - mean);
    }
    return std::sqrt(acc / 3.0);
}

}  // namespace

void order_simplex(std::array<Vertex, 3>& simplex) {
    std::array<std::size_t, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (simplex[a].f != simplex[b].f) {
            return simplex[a].f < simplex[b].f;
        }
        return a > b;
    });
    const auto copy = simplex;
    for (std::size_t k = 0; k < 3; ++k) {
        simplex[k] = copy[idx[k]];
    }
}

NmStep nelder_mead_step(const Objective& f, std::array<Vertex, 3>& s, const NmParams& prm) {
    Vertex& best = s[0];
    Vertex& second_worst = s[1];
    Vertex& worst = s[2];
    const Point c{(best.x.phi + second_worst.x.phi) / 2.0, (best.x.psi + second_worst.x.psi) / 2.0};

    const Point xr = add(c, sub(c, worst.x), prm.alpha);
    const double fr = checked(f, xr);
    if (fr < best.f) {
        const Point xe = add(c, sub(xr, c), prm.gamma);
        const double fe = checked(f, xe);
        worst = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
        return NmStep::expand;
    }
    if (fr < second_worst.f) {
        worst = {xr, fr};
        return NmStep::reflect;
    }
    const Point xc = add(c, sub(worst.x, c), prm.beta);
    const double fc = checked(f, xc);
    if (fc < worst.f) {
        worst = {xc, fc};
        return NmStep::contract;
    }
    for (std::size_t i = 1; i < 3; ++i) {
        s[i].x = add(best.x, sub(s[i].x, best.x), prm.sigma);
        s[i].f = checked(f, s[i].x);
    }
    return NmStep::shrink;
}

NmResult nelder_mead(const Objective& f, Point start, const NmParams& prm) {
    prm.validate();
    if (!std::isfinite(start.phi) || !std::isfinite(start.psi)) {
        throw InvalidArgument("Nelder-Mead start must be finite");
    }
    std::array<Vertex, 3> s{Vertex{start, 0.0}, Vertex{{start.phi + prm.initial_edge, start.psi}, 0.0},
                            Vertex{{start.phi, start.psi + prm.initial_edge}, 0.0}};
    for (auto& v : s) {
        v.f = checked(f, v.x);
    }
    NmResult r;
    for (;;) {
        order_simplex(s);
        if (value_stddev(s) < prm.stddev_tol || r.iterations >= prm.max_iters) {
            break;
        }
        r.steps.push_back(nelder_mead_step(f, s, prm));
        ++r.iterations;
    }
    r.point = s[0].x;
    r.value = s[0].f;
    return r;
}

void CgParams::validate() const {
    if (!(grad_tol > 0.0) || !(armijo_c > 0.0 && armijo_c < 1.0) || !(backtrack > 0.0 && backtrack < 1.0) ||
        !(initial_step > 0.0) || !(max_step_length > 0.0) || restart_period == 0) {
        throw InvalidArgument("conjugate gradient parameters out of range");
    }
}

namespace {

Point project(const std::optional<Bounds>& b, Point x) {
    if (!b) {
        return x;
    }
    return {std::clamp(x.phi, b->phi_lo, b->phi_hi), std::clamp(x.psi, b->psi_lo, b->psi_hi)};
}

/// Drops gradient components that would push a point on an active bound outward.
Point free_gradient(const std::optional<Bounds>& b, Point x, Point g) {
    if (!b) {
        return g;
    }
    if ((x.phi <= b->phi_lo && g.phi > 0.0) || (x.phi >= b->phi_hi && g.phi < 0.0)) {
        g.phi = 0.0;
    }
    if ((x.psi <= b->psi_lo && g.psi > 0.0) || (x.psi >= b->psi_hi && g.psi < 0.0)) {
        g.psi = 0.0;
    }
    return g;
}

Point checked_grad(const Objective& f, Point x) {
    const Point g = f.gradient(x);
    if (!std::isfinite(g.phi) || !std::isfinite(g.psi)) {
        throw OptimizerError("gradient is not finite at (" + std::to_string(x.phi) + ", " + std::to_string(x.psi) +
                             ")");
    }
    return g;
}

}  // namespace

CgResult conjugate_gd(const Objective& f, Point start, const CgParams& prm) {
    prm.validate();
    if (!std::isfinite(start.phi) || !std::isfinite(start.psi)) {
        throw InvalidArgument("gradient descent start must be finite");
    }
    CgResult r;
    Point x = project(prm.clamp, start);
    double fx = checked(f, x);
    Point g = checked_grad(f, x);
    Point d{-g.phi, -g.psi};
    r.stop_reason = "max_iters";
    for (;;) {
        const Point gf = free_gradient(prm.clamp, x, g);
        r.grad_norm = std::sqrt(dot(gf, gf));
        if (r.grad_norm < prm.grad_tol) {
            r.stop_reason = "gradient";
            break;
        }
        if (r.iterations >= prm.max_iters) {
            break;
        }
        if (dot(g, d) >= 0.0) {
            d = {-g.phi, -g.psi};
        }
        const double dn = std::sqrt(dot(d, d));
        double alpha = std::min(prm.initial_step, prm.max_step_length / dn);
        bool accepted = false;
        Point xn = x;
        double fn = fx;
        for (std::size_t k = 0; k <= prm.max_backtracks; ++k, alpha *= prm.backtrack) {
            xn = project(prm.clamp, add(x, d, alpha));
            fn = checked(f, xn);
            // With projection the actual displacement replaces alpha * d.
            if (fn <= fx + prm.armijo_c * dot(g, sub(xn, x))) {
                accepted = true;
                break;
            }
        }
        if (!accepted || (xn.phi == x.phi && xn.psi == x.psi)) {
            r.stop_reason = "stalled";
            break;
        }
        ++r.iterations;
        r.step_sizes.push_back(alpha);
        const Point gn = checked_grad(f, xn);
        double beta = 0.0;
        if (prm.beta == CgBeta::polak_ribiere_plus && r.iterations % prm.restart_period != 0) {
            const double gg = dot(g, g);
            beta = gg > 0.0 ? std::max(0.0, dot(gn, sub(gn, g)) / gg) : 0.0;
        }
        d = {-gn.phi + beta * d.phi, -gn.psi + beta * d.psi};
        x = xn;
        fx = fn;
        g = gn;
    }
    r.point = x;
    r.value = fx;
    return r;
}

}  // namespace annealbench
