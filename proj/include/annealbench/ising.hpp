#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace annealbench {

/// Raised when an input violates a documented precondition (bad sizes,
/// out-of-range parameters, malformed files).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Coupling {
    std::size_t i;
    std::size_t j;
    double value;
};

struct Neighbor {
    std::size_t index;
    double value;
};

/// Linear and pairwise terms accumulated by an encoder before being merged
/// into a problem. Couplings may be listed in either index order and may repeat.
struct Contribution {
    std::vector<double> h;
    std::vector<Coupling> j;
    double offset = 0.0;
};

/// Classical Ising energy function
///   E(s) = offset + sum_{i<j} J_ij s_i s_j + sum_i h_i s_i
/// Each unordered pair is stored once; adjacency lists are sorted by neighbour index.
class IsingProblem {
public:
    IsingProblem() = default;
    explicit IsingProblem(std::size_t n_spins, std::string label = {});

    std::size_t size() const { return h_.size(); }

    double field(std::size_t i) const;
    std::span<const double> fields() const { return h_; }
    void add_field(std::size_t i, double value);
    void set_field(std::size_t i, double value);

    /// Symmetric lookup; absent pairs read as zero.
    double coupling(std::size_t i, std::size_t j) const;
    /// Accumulates into the canonical (min, max) entry.
    void add_coupling(std::size_t i, std::size_t j, double value);
    std::span<const Neighbor> neighbors(std::size_t i) const;
    /// All stored couplings with i < j, sorted lexicographically.
    std::vector<Coupling> couplings() const;
    std::size_t coupling_count() const { return pair_count_; }

    double offset() const { return offset_; }
    void set_offset(double v) { offset_ = v; }
    void add_offset(double v) { offset_ += v; }

    const std::string& label() const { return label_; }
    void set_label(std::string label) { label_ = std::move(label); }

    void merge(const Contribution& c);
    /// Multiplies every h, J and the offset by `factor`.
    void scale(double factor);

    /// Throws InvalidArgument when any value is non-finite.
    void validate() const;

private:
    void check_index(std::size_t i) const;

    std::vector<double> h_;
    std::vector<std::vector<Neighbor>> adj_;
    std::size_t pair_count_ = 0;
    double offset_ = 0.0;
    std::string label_;
};

/// A vector of +-1 spins.
class SpinState {
public:
    SpinState() = default;
    explicit SpinState(std::size_t n, std::int8_t value = 1);
    explicit SpinState(std::vector<std::int8_t> spins);

    std::size_t size() const { return spins_.size(); }
    std::int8_t operator[](std::size_t i) const { return spins_[i]; }
    void set(std::size_t i, std::int8_t v);
    void flip(std::size_t i) { spins_[i] = static_cast<std::int8_t>(-spins_[i]); }
    std::span<const std::int8_t> spins() const { return spins_; }

    bool operator==(const SpinState&) const = default;

private:
    std::vector<std::int8_t> spins_;
};

struct GridSpec {
    std::size_t side = 2;
    double lambda = 1.0;
};

/// Open-boundary N x N ferromagnet with coupling -lambda between
/// horizontally and vertically adjacent sites. Site (r, c) has index r*N + c.
IsingProblem build_2d_grid(const GridSpec& spec);

double energy(const IsingProblem& p, const SpinState& s);

/// energy(s with spin i flipped) - energy(s), in O(degree).
double delta_energy(const IsingProblem& p, const SpinState& s, std::size_t i);

/// Per-bond normalised coupling energy, -1 for a fully aligned grid and +1
/// when every bond is frustrated. Fields and offset are ignored.
double normalized_energy(const IsingProblem& p, const SpinState& s, double lambda);

/// |sum s_i| / n.
double magnetisation(const SpinState& s);

SpinState random_state(std::size_t n, std::uint64_t seed);

nlohmann::json to_json(const IsingProblem& p);
IsingProblem problem_from_json(const nlohmann::json& j);

}  // namespace annealbench
