#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "annealbench/ising.hpp"

namespace annealbench {

enum class Axis { phi, psi };

struct Bounds {
    double phi_lo = 0.0;
    double phi_hi = 1.0;
    double psi_lo = 0.0;
    double psi_hi = 1.0;
};

/// Geometry of a two-variable domain-wall encoding.
///
/// Spins [0, n) hold phi and [n, 2n) hold psi. In a faithful block the first
/// k spins are -1 and the rest +1, with k in 1..n-1 (the end spins are pinned
/// by the boundary fields). The encoded value is origin + k * step.
struct DwLayout {
    std::size_t n = 3;
    double phi0 = 0.0;
    double psi0 = 0.0;
    double xi = 1.0;
    double zeta = 1.0;
    double chain = 1.0;  ///< ferromagnetic penalty between adjacent block spins
    double pin = 1.0;    ///< boundary field strength on the block end spins

    void validate() const;
    std::size_t spin_count() const { return 2 * n; }
    std::size_t block_begin(Axis a) const { return a == Axis::phi ? 0 : n; }
    double origin(Axis a) const { return a == Axis::phi ? phi0 : psi0; }
    double step(Axis a) const { return a == Axis::phi ? xi : zeta; }
    /// Value represented by k minus spins.
    double value(Axis a, std::size_t k) const { return origin(a) + step(a) * static_cast<double>(k); }
    /// Nearest representable k in 1..n-1 for a continuous value.
    std::size_t nearest_k(Axis a, double v) const;
};

/// Layout whose n-1 representable values span [lo, hi] on each axis:
/// step = (hi - lo) / (n - 2) and origin = lo - step.
DwLayout layout_for_bounds(std::size_t n, const Bounds& b, double chain, double pin);

/// values[i * n + j] = U(phi0 + i*xi, psi0 + j*zeta) for i, j in 0..n-1.
struct PotentialTable {
    std::size_t n = 0;
    std::vector<double> values;
    Bounds bounds;

    double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
    double& at(std::size_t i, std::size_t j) { return values[i * n + j]; }
    double min() const;
    double max() const;
    void validate() const;
};

struct DecodedSample {
    double phi = 0.0;
    double psi = 0.0;
    bool valid = false;
    std::size_t walls_phi = 0;
    std::size_t walls_psi = 0;
    std::size_t k_phi = 0;  ///< number of -1 spins in the phi block
    std::size_t k_psi = 0;
};

/// Boundary fields (+pin on the first spin, -pin on the last spin of each
/// block) and -chain couplings between adjacent spins inside each block.
IsingProblem build_chain(const DwLayout& layout);

/// Energy of build_chain(layout) on any faithful state.
double chain_baseline(const DwLayout& layout);

DecodedSample decode(const SpinState& s, const DwLayout& layout);

/// Faithful state with k_phi and k_psi minus spins in the two blocks.
SpinState plant(const DwLayout& layout, std::size_t k_phi, std::size_t k_psi);
/// Faithful state nearest to the continuous point (phi, psi).
SpinState plant_point(const DwLayout& layout, double phi, double psi);

/// Encodes a 1D profile V (n samples along `axis`) into fields
/// h_j = -(V[j+1] - V[j]) / 2. The returned offset makes the added energy of a
/// single-wall block with k minus spins equal V[k] exactly.
Contribution encode_1d_into_h(const DwLayout& layout, Axis axis, std::span<const double> values);

/// Same landscape through couplings on adjacent pairs: the pair (k-1, k)
/// carries V[k] - min(V) when broken. min(V) goes to the offset, so every
/// coupling added is ferromagnetic or zero.
Contribution encode_1d_into_j(const DwLayout& layout, Axis axis, std::span<const double> values);

/// Inter-block couplings for the mixed part of a table. The table is reduced
/// to its residual R(i,j) = U(i,j) - U(i,0) - U(0,j) + U(0,0) and the bilinear
/// wall-indicator form sum R(i,j) a_i b_j is expanded into spin products, so a
/// faithful pair of walls (k, k') picks up exactly R(k, k'). Separable tables
/// give all-zero couplings (which are omitted).
Contribution encode_cross(const DwLayout& layout, const PotentialTable& table);

enum class EncodeMode { h_linear, j_linear };

/// Full encoding: chain + 1D fiducial slices + cross residual. For every
/// faithful state, energy - chain_baseline(layout) equals the table entry at
/// the decoded wall positions.
IsingProblem encode_potential(const DwLayout& layout, const PotentialTable& table,
                              EncodeMode mode = EncodeMode::h_linear);

struct Penalties {
    double chain;
    double pin;
};

/// chain = max(2 * (max - min), 1); pin = 2 * chain.
Penalties auto_penalties(const PotentialTable& table);

nlohmann::json layout_to_json(const DwLayout& layout);
DwLayout layout_from_json(const nlohmann::json& j);
/// Encoded problems carry their layout in the label as "... layout={...}".
std::string layout_label(const std::string& prefix, const DwLayout& layout);
DwLayout layout_from_label(const std::string& label);

}  // namespace annealbench
