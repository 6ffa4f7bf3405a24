#include "annealbench/domain_wall.hpp"

#include <algorithm>
#include <cmath>

namespace annealbench {

void DwLayout::validate() const {
    if (n < 3) {
        throw InvalidArgument("domain-wall block needs at least 3 spins, got " + std::to_string(n));
    }
    if (!(xi > 0.0) || !(zeta > 0.0) || !std::isfinite(xi) || !std::isfinite(zeta)) {
        throw InvalidArgument("lattice steps must be positive and finite");
    }
    if (!(chain > 0.0) || !(pin > 0.0) || !std::isfinite(chain) || !std::isfinite(pin)) {
        throw InvalidArgument("chain penalties must be positive and finite");
    }
    if (!std::isfinite(phi0) || !std::isfinite(psi0)) {
        throw InvalidArgument("lattice origins must be finite");
    }
}

std::size_t DwLayout::nearest_k(Axis a, double v) const {
    const double k = std::round((v - origin(a)) / step(a));
    const double clamped = std::clamp(k, 1.0, static_cast<double>(n - 1));
    return static_cast<std::size_t>(clamped);
}

DwLayout layout_for_bounds(std::size_t n, const Bounds& b, double chain, double pin) {
    if (n < 3) {
        throw InvalidArgument("domain-wall block needs at least 3 spins");
    }
    if (!(b.phi_hi > b.phi_lo) || !(b.psi_hi > b.psi_lo)) {
        throw InvalidArgument("bounds must be non-empty");
    }
    DwLayout l;
    l.n = n;
    l.xi = (b.phi_hi - b.phi_lo) / static_cast<double>(n - 2);
    l.zeta = (b.psi_hi - b.psi_lo) / static_cast<double>(n - 2);
    l.phi0 = b.phi_lo - l.xi;
    l.psi0 = b.psi_lo - l.zeta;
    l.chain = chain;
    l.pin = pin;
    l.validate();
    return l;
}

double PotentialTable::min() const { return *std::min_element(values.begin(), values.end()); }

double PotentialTable::max() const { return *std::max_element(values.begin(), values.end()); }

void PotentialTable::validate() const {
    if (n < 3 || values.size() != n * n) {
        throw InvalidArgument("potential table must be n x n with n >= 3");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("potential table contains a non-finite entry");
        }
    }
}

IsingProblem build_chain(const DwLayout& layout) {
    layout.validate();
    const std::size_t n = layout.n;
    IsingProblem p(2 * n);
    for (std::size_t base : {std::size_t{0}, n}) {
        p.add_field(base, layout.pin);
        p.add_field(base + n - 1, -layout.pin);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            p.add_coupling(base + i, base + i + 1, -layout.chain);
        }
    }
    return p;
}

double chain_baseline(const DwLayout& layout) {
    // n-2 aligned bonds and one broken bond per block, both pins satisfied.
    const double per_block = -static_cast<double>(layout.n - 3) * layout.chain - 2.0 * layout.pin;
    return 2.0 * per_block;
}

namespace {

struct BlockReading {
    std::size_t minus = 0;
    std::size_t walls = 0;
    bool pinned_ok = false;
};

BlockReading read_block(const SpinState& s, std::size_t begin, std::size_t n) {
    BlockReading r;
    for (std::size_t i = 0; i < n; ++i) {
        if (s[begin + i] < 0) {
            ++r.minus;
        }
        if (i > 0 && s[begin + i] != s[begin + i - 1]) {
            ++r.walls;
        }
    }
    r.pinned_ok = s[begin] == -1 && s[begin + n - 1] == 1;
    return r;
}

void check_profile(const DwLayout& layout, std::span<const double> values) {
    layout.validate();
    if (values.size() != layout.n) {
        throw InvalidArgument("1D profile has " + std::to_string(values.size()) +
                              " samples, layout needs " + std::to_string(layout.n));
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("1D profile contains a non-finite sample");
        }
    }
}

}  // namespace

DecodedSample decode(const SpinState& s, const DwLayout& layout) {
    if (s.size() != layout.spin_count()) {
        throw InvalidArgument("state has " + std::to_string(s.size()) + " spins, layout needs " +
                              std::to_string(layout.spin_count()));
    }
    const auto a = read_block(s, 0, layout.n);
    const auto b = read_block(s, layout.n, layout.n);
    DecodedSample d;
    d.k_phi = a.minus;
    d.k_psi = b.minus;
    d.phi = layout.value(Axis::phi, a.minus);
    d.psi = layout.value(Axis::psi, b.minus);
    d.walls_phi = a.walls;
    d.walls_psi = b.walls;
    d.valid = a.walls == 1 && b.walls == 1 && a.pinned_ok && b.pinned_ok;
    return d;
}

SpinState plant(const DwLayout& layout, std::size_t k_phi, std::size_t k_psi) {
    layout.validate();
    if (k_phi < 1 || k_phi >= layout.n || k_psi < 1 || k_psi >= layout.n) {
        throw InvalidArgument("wall positions must lie in 1..n-1");
    }
    std::vector<std::int8_t> spins(layout.spin_count(), 1);
    for (std::size_t i = 0; i < k_phi; ++i) {
        spins[i] = -1;
    }
    for (std::size_t i = 0; i < k_psi; ++i) {
        spins[layout.n + i] = -1;
    }
    return SpinState(std::move(spins));
}

SpinState plant_point(const DwLayout& layout, double phi, double psi) {
    return plant(layout, layout.nearest_k(Axis::phi, phi), layout.nearest_k(Axis::psi, psi));
}

Contribution encode_1d_into_h(const DwLayout& layout, Axis axis, std::span<const double> values) {
    check_profile(layout, values);
    const std::size_t n = layout.n;
    const std::size_t base = layout.block_begin(axis);
    Contribution c;
    c.h.assign(layout.spin_count(), 0.0);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        c.h[base + j] = -0.5 * (values[j + 1] - values[j]);
    }
    // sum_j h_j s_j = V[k] - (V[0] + V[n-1]) / 2 for a block with k minus spins.
    c.offset = 0.5 * (values[0] + values[n - 1]);
    return c;
}

Contribution encode_1d_into_j(const DwLayout& layout, Axis axis, std::span<const double> values) {
    check_profile(layout, values);
    const std::size_t n = layout.n;
    const std::size_t base = layout.block_begin(axis);
    const double floor = *std::min_element(values.begin() + 1, values.end());
    Contribution c;
    c.offset = floor;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        // (V - floor)/2 * (1 - s_j s_{j+1}): the wall between j and j+1 means k = j+1.
        const double w = values[j + 1] - floor;
        if (w != 0.0) {
            c.j.push_back({base + j, base + j + 1, -0.5 * w});
            c.offset += 0.5 * w;
        }
    }
    return c;
}

namespace {

std::vector<double> residual(const PotentialTable& t) {
    const std::size_t n = t.n;
    std::vector<double> r(n * n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 1; j < n; ++j) {
            r[i * n + j] = t.at(i, j) - t.at(i, 0) - t.at(0, j) + t.at(0, 0);
        }
    }
    return r;
}

void check_table(const DwLayout& layout, const PotentialTable& table) {
    layout.validate();
    table.validate();
    if (table.n != layout.n) {
        throw InvalidArgument("table is " + std::to_string(table.n) + "x" + std::to_string(table.n) +
                              ", layout needs " + std::to_string(layout.n));
    }
}

}  // namespace

Contribution encode_cross(const DwLayout& layout, const PotentialTable& table) {
    check_table(layout, table);
    const std::size_t n = layout.n;
    const auto r = residual(table);
    // Zero outside 1..n-1 in either index; row and column 0 already vanish.
    auto rt = [&](std::size_t i, std::size_t j) { return (i < n && j < n) ? r[i * n + j] : 0.0; };
    Contribution c;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            const double v = 0.25 * (rt(p, q) - rt(p, q + 1) - rt(p + 1, q) + rt(p + 1, q + 1));
            if (v != 0.0) {
                c.j.push_back({p, n + q, v});
            }
        }
    }
    return c;
}

IsingProblem encode_potential(const DwLayout& layout, const PotentialTable& table, EncodeMode mode) {
    check_table(layout, table);
    const std::size_t n = layout.n;
    IsingProblem p = build_chain(layout);

    std::vector<double> phi_slice(n);
    std::vector<double> psi_slice(n);
    for (std::size_t i = 0; i < n; ++i) {
        phi_slice[i] = table.at(i, 0);
        psi_slice[i] = table.at(0, i);
    }
    if (mode == EncodeMode::h_linear) {
        p.merge(encode_1d_into_h(layout, Axis::phi, phi_slice));
        p.merge(encode_1d_into_h(layout, Axis::psi, psi_slice));
    } else {
        p.merge(encode_1d_into_j(layout, Axis::phi, phi_slice));
        p.merge(encode_1d_into_j(layout, Axis::psi, psi_slice));
    }
    p.merge(encode_cross(layout, table));
    // U(k,k') = U(k,0) + U(0,k') - U(0,0) + R(k,k').
    p.add_offset(-table.at(0, 0));
    p.set_label(layout_label("dwe", layout));
    p.validate();
    return p;
}

Penalties auto_penalties(const PotentialTable& table) {
    table.validate();
    const double chain = std::max(2.0 * (table.max() - table.min()), 1.0);
    return {chain, 2.0 * chain};
}

nlohmann::json layout_to_json(const DwLayout& l) {
    return {{"N", l.n},         {"phi0", l.phi0},     {"psi0", l.psi0},         {"xi", l.xi},
            {"zeta", l.zeta}, {"Lambda", l.chain}, {"LambdaPrime", l.pin}};
}

DwLayout layout_from_json(const nlohmann::json& j) {
    try {
        DwLayout l;
        l.n = j.at("N").get<std::size_t>();
        l.phi0 = j.at("phi0").get<double>();
        l.psi0 = j.at("psi0").get<double>();
        l.xi = j.at("xi").get<double>();
        l.zeta = j.at("zeta").get<double>();
        l.chain = j.at("Lambda").get<double>();
        l.pin = j.at("LambdaPrime").get<double>();
        l.validate();
        return l;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed layout JSON: ") + e.what());
    }
}

std::string layout_label(const std::string& prefix, const DwLayout& layout) {
    return prefix + " layout=" + layout_to_json(layout).dump();
}

DwLayout layout_from_label(const std::string& label) {
    const auto pos = label.find("layout=");
    if (pos == std::string::npos) {
        throw InvalidArgument("label carries no layout block");
    }
    try {
        return layout_from_json(nlohmann::json::parse(label.substr(pos + 7)));
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidArgument(std::string("malformed layout block: ") + e.what());
    }
}

}  // namespace annealbench
