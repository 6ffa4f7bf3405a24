#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "annealbench/domain_wall.hpp"

namespace annealbench {

struct Point {
    double phi = 0.0;
    double psi = 0.0;
};

enum class PotentialId { u1, u2, u3, custom };

/// Multi-well plateau constants: global hole depth p0 at the origin and seven
/// satellite holes of depth p_a at v_a, all of width omega.
namespace u2_params {
inline constexpr double omega = 0.3;
inline constexpr double global_depth = 3.0;
inline constexpr std::array<double, 7> depths{0.9, 0.3, 1.2, 1.8, 1.5, 1.8, 2.4};
inline constexpr std::array<Point, 7> positions{{{-1.2, -1.35},
                                                 {-1.95, 0.9},
                                                 {0.9, 1.95},
                                                 {1.5, -1.65},
                                                 {1.8, 0.6},
                                                 {-0.6, 1.8},
                                                 {1.65, -0.9}}};
}  // namespace u2_params

/// Tabulated potential on a uniform (n x n) node grid spanning `bounds`,
/// evaluated by bilinear interpolation and clamped outside the bounds.
struct CustomGrid {
    std::size_t n = 0;
    std::vector<double> values;  ///< row-major, rows along phi
    Bounds bounds;
};

/// A scalar field U(phi, psi) scaled by lambda on a rectangular domain.
class Potential {
public:
    static Potential u1(double lambda);
    /// `literal_sign` selects +sum p_a sech^2 (bumps) instead of holes.
    static Potential u2(double lambda, bool literal_sign = false);
    static Potential u3(double lambda);
    static Potential custom(CustomGrid grid, double lambda = 1.0);
    /// Parses "u1", "u2", "u3" or "custom:<csv path>".
    static Potential from_name(const std::string& name, double lambda, bool u2_literal_sign = false);

    PotentialId id() const { return id_; }
    std::string name() const;
    double lambda() const { return lambda_; }
    const Bounds& bounds() const { return bounds_; }
    bool u2_literal_sign() const { return literal_sign_; }

    Potential with_lambda(double lambda) const;
    Potential with_bounds(const Bounds& b) const;

    double eval(double phi, double psi) const;
    double eval(Point p) const { return eval(p.phi, p.psi); }
    Point grad(double phi, double psi) const;
    Point grad(Point p) const { return grad(p.phi, p.psi); }

private:
    Potential(PotentialId id, double lambda, Bounds b);

    double unit_eval(double phi, double psi) const;
    Point unit_grad(double phi, double psi) const;

    PotentialId id_;
    double lambda_;
    Bounds bounds_;
    bool literal_sign_ = false;
    std::shared_ptr<const CustomGrid> grid_;
};

Bounds default_bounds(PotentialId id);

/// Table on the domain-wall lattice of layout_for_bounds(n, p.bounds()).
PotentialTable sample(const Potential& p, std::size_t n);

struct TruthRecord {
    Point argmin;
    double min_value = 0.0;
    std::size_t resolution = 0;
};

/// Dense scan followed by coordinate descent with a shrinking step (to 1e-10),
/// confined to the bounds. Deterministic.
TruthRecord true_minimum(const Potential& p, std::size_t coarse_n = 1001);

/// Local-minimum census: grid points not exceeding any of their 8 neighbours,
/// refined and de-duplicated, sorted by value.
std::vector<TruthRecord> local_minima(const Potential& p, std::size_t grid_n = 401);

double distance_to_truth(const TruthRecord& truth, Point p);

/// CSV: first row phi_lo,phi_hi,psi_lo,psi_hi (an optional literal header line
/// with those names may precede it), then n rows of n values.
CustomGrid load_custom_csv(const std::string& path);

}  // namespace annealbench
