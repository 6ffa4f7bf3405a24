#include "annealbench/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "annealbench/csv.hpp"

namespace annealbench {

Bounds default_bounds(PotentialId id) {
    switch (id) {
        case PotentialId::u1:
        case PotentialId::u2:
            return {-3.0, 3.0, -3.0, 3.0};
        case PotentialId::u3:
            return {-2.0, 2.0, -2.0, 2.0};
        case PotentialId::custom:
            break;
    }
    return {0.0, 1.0, 0.0, 1.0};
}

Potential::Potential(PotentialId id, double lambda, Bounds b) : id_(id), lambda_(lambda), bounds_(b) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InvalidArgument("potential scale lambda must be positive and finite");
    }
    if (!(b.phi_hi > b.phi_lo) || !(b.psi_hi > b.psi_lo)) {
        throw InvalidArgument("potential bounds must be non-empty");
    }
}

Potential Potential::u1(double lambda) { return Potential(PotentialId::u1, lambda, default_bounds(PotentialId::u1)); }

Potential Potential::u2(double lambda, bool literal_sign) {
    Potential p(PotentialId::u2, lambda, default_bounds(PotentialId::u2));
    p.literal_sign_ = literal_sign;
    return p;
}

Potential Potential::u3(double lambda) { return Potential(PotentialId::u3, lambda, default_bounds(PotentialId::u3)); }

Potential Potential::custom(CustomGrid grid, double lambda) {
    if (grid.n < 2 || grid.values.size() != grid.n * grid.n) {
        throw InvalidArgument("custom grid must be n x n with n >= 2");
    }
    for (double v : grid.values) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("custom grid contains a non-finite value");
        }
    }
    Potential p(PotentialId::custom, lambda, grid.bounds);
    p.grid_ = std::make_shared<const CustomGrid>(std::move(grid));
    return p;
}

Potential Potential::from_name(const std::string& name, double lambda, bool u2_literal_sign) {
    if (name == "u1") {
        return u1(lambda);
    }
    if (name == "u2") {
        return u2(lambda, u2_literal_sign);
    }
    if (name == "u3") {
        return u3(lambda);
    }
    if (name.rfind("custom:", 0) == 0) {
        return custom(load_custom_csv(name.substr(7)), lambda);
    }
    throw InvalidArgument("unknown potential '" + name + "' (expected u1, u2, u3 or custom:<path>)");
}

std::string Potential::name() const {
    switch (id_) {
        case PotentialId::u1:
            return "u1";
        case PotentialId::u2:
            return literal_sign_ ? "u2-literal" : "u2";
        case PotentialId::u3:
            return "u3";
        case PotentialId::custom:
            return "custom";
    }
    return "unknown";
}

Potential Potential::with_lambda(double lambda) const {
    Potential p = *this;
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InvalidArgument("potential scale lambda must be positive and finite");
    }
    p.lambda_ = lambda;
    return p;
}

Potential Potential::with_bounds(const Bounds& b) const {
    if (!(b.phi_hi > b.phi_lo) || !(b.psi_hi > b.psi_lo)) {
        throw InvalidArgument("potential bounds must be non-empty");
    }
    Potential p = *this;
    p.bounds_ = b;
    return p;
}

double Potential::eval(double phi, double psi) const { return lambda_ * unit_eval(phi, psi); }

Point Potential::grad(double phi, double psi) const {
    const Point g = unit_grad(phi, psi);
    return {lambda_ * g.phi, lambda_ * g.psi};
}

namespace {

double sech2(double x) {
    const double c = std::cosh(x);
    return 1.0 / (c * c);
}

/// d/dr [tanh^2(r/w)] / r = 2 tanh(r/w) sech^2(r/w) / (w r), finite at r = 0.
double radial_tanh2(double r, double w) {
    const double x = r / w;
    if (x < 1e-4) {
        // tanh(x) sech^2(x) / x = 1 - (5/3) x^2 + O(x^4)
        return 2.0 / (w * w) * (1.0 - 5.0 / 3.0 * x * x);
    }
    return 2.0 * std::tanh(x) * sech2(x) / (w * r);
}

struct Cell {
    std::size_t i;
    double t;
};

Cell locate(double v, double lo, double hi, std::size_t n) {
    const double pos = std::clamp((v - lo) / (hi - lo), 0.0, 1.0) * static_cast<double>(n - 1);
    const auto i = std::min(static_cast<std::size_t>(pos), n - 2);
    return {i, pos - static_cast<double>(i)};
}

}  // namespace

double Potential::unit_eval(double phi, double psi) const {
    switch (id_) {
        case PotentialId::u1:
            return -(phi * (1.0 - phi) + psi * (1.0 - psi) +
                     12.0 * std::cos(phi * psi) * std::sin(psi + 2.0 * phi));
        case PotentialId::u2: {
            using namespace u2_params;
            const double t = std::tanh(std::hypot(phi, psi) / omega);
            double holes = 0.0;
            for (std::size_t a = 0; a < depths.size(); ++a) {
                holes += depths[a] * sech2(std::hypot(phi - positions[a].phi, psi - positions[a].psi) / omega);
            }
            return global_depth * t * t + (literal_sign_ ? holes : -holes);
        }
        case PotentialId::u3:
            return 2.0 * std::exp(-(std::pow(phi, 4) + std::pow(psi, 4)) / 2.0) -
                   10.0 * std::exp(-20.0 * (phi * phi + psi * psi)) * std::pow(std::cos(psi), 2) *
                       std::pow(std::cos(phi), 2);
        case PotentialId::custom: {
            const auto& g = *grid_;
            const auto a = locate(phi, g.bounds.phi_lo, g.bounds.phi_hi, g.n);
            const auto b = locate(psi, g.bounds.psi_lo, g.bounds.psi_hi, g.n);
            auto v = [&](std::size_t i, std::size_t j) { return g.values[i * g.n + j]; };
            return (1 - a.t) * (1 - b.t) * v(a.i, b.i) + a.t * (1 - b.t) * v(a.i + 1, b.i) +
                   (1 - a.t) * b.t * v(a.i, b.i + 1) + a.t * b.t * v(a.i + 1, b.i + 1);
        }
    }
    return 0.0;
}

Point Potential::unit_grad(double phi, double psi) const {
    switch (id_) {
        case PotentialId::u1: {
            const double c = std::cos(phi * psi);
            const double s = std::sin(phi * psi);
            const double sa = std::sin(psi + 2.0 * phi);
            const double ca = std::cos(psi + 2.0 * phi);
            return {-(1.0 - 2.0 * phi + 12.0 * (-psi * s * sa + 2.0 * c * ca)),
                    -(1.0 - 2.0 * psi + 12.0 * (-phi * s * sa + c * ca))};
        }
        case PotentialId::u2: {
            using namespace u2_params;
            const double g0 = global_depth * radial_tanh2(std::hypot(phi, psi), omega);
            Point out{g0 * phi, g0 * psi};
            // d/dr[-p sech^2(r/w)] / r equals p * radial_tanh2(r, w).
            const double sign = literal_sign_ ? -1.0 : 1.0;
            for (std::size_t a = 0; a < depths.size(); ++a) {
                const double dx = phi - positions[a].phi;
                const double dy = psi - positions[a].psi;
                const double ga = sign * depths[a] * radial_tanh2(std::hypot(dx, dy), omega);
                out.phi += ga * dx;
                out.psi += ga * dy;
            }
            return out;
        }
        case PotentialId::u3: {
            const double quartic = std::exp(-(std::pow(phi, 4) + std::pow(psi, 4)) / 2.0);
            const double well = std::exp(-20.0 * (phi * phi + psi * psi));
            const double cp = std::cos(phi);
            const double sp = std::sin(phi);
            const double cq = std::cos(psi);
            const double sq = std::sin(psi);
            return {-4.0 * std::pow(phi, 3) * quartic +
                        10.0 * well * cq * cq * (40.0 * phi * cp * cp + 2.0 * sp * cp),
                    -4.0 * std::pow(psi, 3) * quartic +
                        10.0 * well * cp * cp * (40.0 * psi * cq * cq + 2.0 * sq * cq)};
        }
        case PotentialId::custom: {
            // Derivative of the bilinear interpolant (one-sided at cell edges).
            const auto& g = *grid_;
            const auto a = locate(phi, g.bounds.phi_lo, g.bounds.phi_hi, g.n);
            const auto b = locate(psi, g.bounds.psi_lo, g.bounds.psi_hi, g.n);
            auto v = [&](std::size_t i, std::size_t j) { return g.values[i * g.n + j]; };
            const double hx = (g.bounds.phi_hi - g.bounds.phi_lo) / static_cast<double>(g.n - 1);
            const double hy = (g.bounds.psi_hi - g.bounds.psi_lo) / static_cast<double>(g.n - 1);
            const double dphi = ((1 - b.t) * (v(a.i + 1, b.i) - v(a.i, b.i)) +
                                 b.t * (v(a.i + 1, b.i + 1) - v(a.i, b.i + 1))) / hx;
            const double dpsi = ((1 - a.t) * (v(a.i, b.i + 1) - v(a.i, b.i)) +
                                 a.t * (v(a.i + 1, b.i + 1) - v(a.i + 1, b.i))) / hy;
            return {dphi, dpsi};
        }
    }
    return {};
}

PotentialTable sample(const Potential& p, std::size_t n) {
    if (n < 3) {
        throw InvalidArgument("sample: n must be at least 3");
    }
    const DwLayout l = layout_for_bounds(n, p.bounds(), 1.0, 1.0);
    PotentialTable t;
    t.n = n;
    t.bounds = p.bounds();
    t.values.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            t.at(i, j) = p.eval(l.value(Axis::phi, i), l.value(Axis::psi, j));
        }
    }
    return t;
}

namespace {

Point clamp_to(const Bounds& b, Point p) {
    return {std::clamp(p.phi, b.phi_lo, b.phi_hi), std::clamp(p.psi, b.psi_lo, b.psi_hi)};
}

TruthRecord refine(const Potential& p, Point start, double step) {
    const Bounds& b = p.bounds();
    Point x = clamp_to(b, start);
    double fx = p.eval(x);
    while (step > 1e-10) {
        bool improved = false;
        for (int axis = 0; axis < 2; ++axis) {
            for (double dir : {1.0, -1.0}) {
                Point y = x;
                (axis == 0 ? y.phi : y.psi) += dir * step;
                y = clamp_to(b, y);
                const double fy = p.eval(y);
                if (fy < fx) {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if (!improved) {
            step *= 0.5;
        }
    }
    return {x, fx, 0};
}

}  // namespace

TruthRecord true_minimum(const Potential& p, std::size_t coarse_n) {
    if (coarse_n < 2) {
        throw InvalidArgument("true_minimum: coarse grid needs at least 2 points per side");
    }
    const Bounds& b = p.bounds();
    const double hx = (b.phi_hi - b.phi_lo) / static_cast<double>(coarse_n - 1);
    const double hy = (b.psi_hi - b.psi_lo) / static_cast<double>(coarse_n - 1);
    Point best{b.phi_lo, b.psi_lo};
    double best_v = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < coarse_n; ++i) {
        for (std::size_t j = 0; j < coarse_n; ++j) {
            const Point x{b.phi_lo + hx * static_cast<double>(i), b.psi_lo + hy * static_cast<double>(j)};
            const double v = p.eval(x);
            if (v < best_v) {
                best_v = v;
                best = x;
            }
        }
    }
    TruthRecord t = refine(p, best, std::max(hx, hy));
    t.resolution = coarse_n;
    return t;
}

std::vector<TruthRecord> local_minima(const Potential& p, std::size_t grid_n) {
    if (grid_n < 3) {
        throw InvalidArgument("local_minima: grid needs at least 3 points per side");
    }
    const Bounds& b = p.bounds();
    const double hx = (b.phi_hi - b.phi_lo) / static_cast<double>(grid_n - 1);
    const double hy = (b.psi_hi - b.psi_lo) / static_cast<double>(grid_n - 1);
    std::vector<double> v(grid_n * grid_n);
    for (std::size_t i = 0; i < grid_n; ++i) {
        for (std::size_t j = 0; j < grid_n; ++j) {
            v[i * grid_n + j] = p.eval(b.phi_lo + hx * static_cast<double>(i), b.psi_lo + hy * static_cast<double>(j));
        }
    }
    std::vector<TruthRecord> found;
    for (std::size_t i = 0; i < grid_n; ++i) {
        for (std::size_t j = 0; j < grid_n; ++j) {
            const double c = v[i * grid_n + j];
            bool is_min = true;
            for (int di = -1; di <= 1 && is_min; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    const auto ii = static_cast<std::ptrdiff_t>(i) + di;
                    const auto jj = static_cast<std::ptrdiff_t>(j) + dj;
                    if ((di == 0 && dj == 0) || ii < 0 || jj < 0 || ii >= static_cast<std::ptrdiff_t>(grid_n) ||
                        jj >= static_cast<std::ptrdiff_t>(grid_n)) {
                        continue;
                    }
                    if (v[static_cast<std::size_t>(ii) * grid_n + static_cast<std::size_t>(jj)] < c) {
                        is_min = false;
                        break;
                    }
                }
            }
            if (!is_min) {
                continue;
            }
            TruthRecord r = refine(p, {b.phi_lo + hx * static_cast<double>(i), b.psi_lo + hy * static_cast<double>(j)},
                                   std::max(hx, hy));
            r.resolution = grid_n;
            const bool duplicate = std::any_of(found.begin(), found.end(), [&](const TruthRecord& f) {
                return std::hypot(f.argmin.phi - r.argmin.phi, f.argmin.psi - r.argmin.psi) < 1e-3;
            });
            if (!duplicate) {
                found.push_back(r);
            }
        }
    }
    std::sort(found.begin(), found.end(),
              [](const TruthRecord& a, const TruthRecord& c) { return a.min_value < c.min_value; });
    return found;
}

double distance_to_truth(const TruthRecord& truth, Point p) {
    return std::hypot(p.phi - truth.argmin.phi, p.psi - truth.argmin.psi);
}

CustomGrid load_custom_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("cannot open potential CSV '" + path + "'");
    }
    auto rows = read_numeric_rows(in, {"phi_lo", "phi_hi", "psi_lo", "psi_hi"});
    if (rows.empty() || rows.front().size() != 4) {
        throw InvalidArgument("potential CSV must start with phi_lo,phi_hi,psi_lo,psi_hi");
    }
    CustomGrid g;
    g.bounds = {rows[0][0], rows[0][1], rows[0][2], rows[0][3]};
    g.n = rows.size() - 1;
    if (g.n < 2) {
        throw InvalidArgument("potential CSV needs at least a 2x2 value grid");
    }
    g.values.reserve(g.n * g.n);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != g.n) {
            throw InvalidArgument("potential CSV row " + std::to_string(r) + " has " +
                                  std::to_string(rows[r].size()) + " values, expected " + std::to_string(g.n));
        }
        g.values.insert(g.values.end(), rows[r].begin(), rows[r].end());
    }
    return g;
}

}  // namespace annealbench
