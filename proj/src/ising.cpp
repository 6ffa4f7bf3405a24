#include "annealbench/ising.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "annealbench/rng.hpp"

namespace annealbench {

IsingProblem::IsingProblem(std::size_t n_spins, std::string label)
    : h_(n_spins, 0.0), adj_(n_spins), label_(std::move(label)) {
    if (n_spins == 0) {
        throw InvalidArgument("IsingProblem needs at least one spin");
    }
}

void IsingProblem::check_index(std::size_t i) const {
    if (i >= h_.size()) {
        throw std::out_of_range("spin index " + std::to_string(i) + " out of range for " +
                                std::to_string(h_.size()) + " spins");
    }
}

double IsingProblem::field(std::size_t i) const {
    check_index(i);
    return h_[i];
}

void IsingProblem::add_field(std::size_t i, double value) {
    check_index(i);
    h_[i] += value;
}

void IsingProblem::set_field(std::size_t i, double value) {
    check_index(i);
    h_[i] = value;
}

namespace {

auto find_neighbor(std::vector<Neighbor>& row, std::size_t j) {
    return std::lower_bound(row.begin(), row.end(), j,
                            [](const Neighbor& n, std::size_t k) { return n.index < k; });
}

}  // namespace

double IsingProblem::coupling(std::size_t i, std::size_t j) const {
    check_index(i);
    check_index(j);
    const auto& row = adj_[i];
    auto it = std::lower_bound(row.begin(), row.end(), j,
                               [](const Neighbor& n, std::size_t k) { return n.index < k; });
    return (it != row.end() && it->index == j) ? it->value : 0.0;
}

void IsingProblem::add_coupling(std::size_t i, std::size_t j, double value) {
    check_index(i);
    check_index(j);
    if (i == j) {
        throw InvalidArgument("self-coupling (" + std::to_string(i) + "," + std::to_string(i) + ")");
    }
    auto& ri = adj_[i];
    auto it = find_neighbor(ri, j);
    if (it != ri.end() && it->index == j) {
        it->value += value;
        find_neighbor(adj_[j], i)->value += value;
        return;
    }
    ri.insert(it, Neighbor{j, value});
    auto& rj = adj_[j];
    rj.insert(find_neighbor(rj, i), Neighbor{i, value});
    ++pair_count_;
}

std::span<const Neighbor> IsingProblem::neighbors(std::size_t i) const {
    check_index(i);
    return adj_[i];
}

std::vector<Coupling> IsingProblem::couplings() const {
    std::vector<Coupling> out;
    out.reserve(pair_count_);
    for (std::size_t i = 0; i < adj_.size(); ++i) {
        for (const auto& n : adj_[i]) {
            if (n.index > i) {
                out.push_back({i, n.index, n.value});
            }
        }
    }
    return out;
}

void IsingProblem::merge(const Contribution& c) {
    if (!c.h.empty()) {
        if (c.h.size() != h_.size()) {
            throw InvalidArgument("contribution field length " + std::to_string(c.h.size()) +
                                  " does not match problem size " + std::to_string(h_.size()));
        }
        for (std::size_t i = 0; i < h_.size(); ++i) {
            h_[i] += c.h[i];
        }
    }
    for (const auto& cp : c.j) {
        add_coupling(cp.i, cp.j, cp.value);
    }
    offset_ += c.offset;
}

void IsingProblem::scale(double factor) {
    for (auto& v : h_) {
        v *= factor;
    }
    for (auto& row : adj_) {
        for (auto& n : row) {
            n.value *= factor;
        }
    }
    offset_ *= factor;
}

void IsingProblem::validate() const {
    if (!std::isfinite(offset_)) {
        throw InvalidArgument("non-finite offset");
    }
    for (std::size_t i = 0; i < h_.size(); ++i) {
        if (!std::isfinite(h_[i])) {
            throw InvalidArgument("non-finite field at " + std::to_string(i));
        }
        for (const auto& n : adj_[i]) {
            if (!std::isfinite(n.value)) {
                throw InvalidArgument("non-finite coupling (" + std::to_string(i) + "," +
                                      std::to_string(n.index) + ")");
            }
        }
    }
}

SpinState::SpinState(std::size_t n, std::int8_t value) : spins_(n, value) {
    if (value != 1 && value != -1) {
        throw InvalidArgument("spin values must be -1 or +1");
    }
}

SpinState::SpinState(std::vector<std::int8_t> spins) : spins_(std::move(spins)) {
    for (auto v : spins_) {
        if (v != 1 && v != -1) {
            throw InvalidArgument("spin values must be -1 or +1");
        }
    }
}

void SpinState::set(std::size_t i, std::int8_t v) {
    if (v != 1 && v != -1) {
        throw InvalidArgument("spin values must be -1 or +1");
    }
    spins_.at(i) = v;
}

IsingProblem build_2d_grid(const GridSpec& spec) {
    if (spec.side < 2) {
        throw InvalidArgument("grid side must be at least 2, got " + std::to_string(spec.side));
    }
    if (!(spec.lambda > 0.0) || !std::isfinite(spec.lambda)) {
        throw InvalidArgument("grid lambda must be positive and finite");
    }
    const std::size_t n = spec.side;
    IsingProblem p(n * n, "grid N=" + std::to_string(n));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const std::size_t i = r * n + c;
            if (c + 1 < n) {
                p.add_coupling(i, i + 1, -spec.lambda);
            }
            if (r + 1 < n) {
                p.add_coupling(i, i + n, -spec.lambda);
            }
        }
    }
    return p;
}

namespace {

void check_dims(const IsingProblem& p, const SpinState& s) {
    if (p.size() != s.size()) {
        throw InvalidArgument("state has " + std::to_string(s.size()) + " spins, problem has " +
                              std::to_string(p.size()));
    }
}

}  // namespace

double energy(const IsingProblem& p, const SpinState& s) {
    check_dims(p, s);
    double e = p.offset();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double si = s[i];
        double pair = 0.0;
        for (const auto& n : p.neighbors(i)) {
            if (n.index > i) {
                pair += n.value * s[n.index];
            }
        }
        e += si * (p.field(i) + pair);
    }
    return e;
}

double delta_energy(const IsingProblem& p, const SpinState& s, std::size_t i) {
    check_dims(p, s);
    if (i >= p.size()) {
        throw std::out_of_range("flip index " + std::to_string(i) + " out of range");
    }
    double local = p.field(i);
    for (const auto& n : p.neighbors(i)) {
        local += n.value * s[n.index];
    }
    return -2.0 * s[i] * local;
}

double normalized_energy(const IsingProblem& p, const SpinState& s, double lambda) {
    check_dims(p, s);
    if (lambda == 0.0) {
        throw InvalidArgument("normalized_energy: lambda must be nonzero");
    }
    if (p.coupling_count() == 0) {
        throw InvalidArgument("normalized_energy: problem has no bonds");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (const auto& n : p.neighbors(i)) {
            if (n.index > i) {
                sum += n.value * s[i] * s[n.index];
            }
        }
    }
    return sum / (lambda * static_cast<double>(p.coupling_count()));
}

double magnetisation(const SpinState& s) {
    if (s.size() == 0) {
        return 0.0;
    }
    long total = 0;
    for (auto v : s.spins()) {
        total += v;
    }
    return static_cast<double>(std::labs(total)) / static_cast<double>(s.size());
}

SpinState random_state(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::int8_t> spins(n);
    for (auto& v : spins) {
        v = rng.coin() ? 1 : -1;
    }
    return SpinState(std::move(spins));
}

nlohmann::json to_json(const IsingProblem& p) {
    nlohmann::json j;
    j["n_spins"] = p.size();
    j["h"] = std::vector<double>(p.fields().begin(), p.fields().end());
    auto arr = nlohmann::json::array();
    for (const auto& c : p.couplings()) {
        arr.push_back(nlohmann::json::array({c.i, c.j, c.value}));
    }
    j["j"] = std::move(arr);
    j["offset"] = p.offset();
    j["label"] = p.label();
    return j;
}

IsingProblem problem_from_json(const nlohmann::json& j) {
    try {
        const auto n = j.at("n_spins").get<std::size_t>();
        IsingProblem p(n, j.value("label", std::string{}));
        const auto& h = j.at("h");
        if (h.size() != n) {
            throw InvalidArgument("h has " + std::to_string(h.size()) + " entries, expected " +
                                  std::to_string(n));
        }
        for (std::size_t i = 0; i < n; ++i) {
            p.set_field(i, h[i].get<double>());
        }
        for (const auto& t : j.at("j")) {
            if (!t.is_array() || t.size() != 3) {
                throw InvalidArgument("coupling entries must be [i, j, value] triples");
            }
            const auto a = t[0].get<std::size_t>();
            const auto b = t[1].get<std::size_t>();
            if (a >= b) {
                throw InvalidArgument("coupling triples must satisfy i < j");
            }
            if (p.coupling(a, b) != 0.0) {
                throw InvalidArgument("duplicate coupling (" + std::to_string(a) + "," +
                                      std::to_string(b) + ")");
            }
            p.add_coupling(a, b, t[2].get<double>());
        }
        p.set_offset(j.value("offset", 0.0));
        p.validate();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed problem JSON: ") + e.what());
    }
}

}  // namespace annealbench
