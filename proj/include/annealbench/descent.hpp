#pragma once

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "annealbench/potentials.hpp"

namespace annealbench {

/// Raised when an optimizer meets a non-finite value or gradient.
class OptimizerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Objective {
    std::function<double(Point)> value;
    std::function<Point(Point)> gradient;
};

Objective objective_of(const Potential& p);

struct NmParams {
    double alpha = 1.0;   ///< reflection
    double gamma = 2.0;   ///< expansion
    double beta = 0.5;    ///< contraction
    double sigma = 0.5;   ///< shrink
    double stddev_tol = 1e-8;
    std::size_t max_iters = 500;
    double initial_edge = 0.5;

    void validate() const;
};

enum class NmStep { reflect, expand, contract, shrink };

struct NmResult {
    Point point;
    double value = 0.0;
    std::size_t iterations = 0;
    std::vector<NmStep> steps;
};

struct Vertex {
    Point x;
    double f;
};

/// Orders a simplex ascending by value. Among equal values the vertex with the
/// lowest current index ends up last (i.e. is treated as the worst).
void order_simplex(std::array<Vertex, 3>& simplex);

/// One update (reflection, expansion, contraction or shrink) on an ordered simplex.
NmStep nelder_mead_step(const Objective& f, std::array<Vertex, 3>& simplex, const NmParams& params);

/// Unconstrained. Starts from the right-angle simplex {x, x + e*phi, x + e*psi}.
NmResult nelder_mead(const Objective& f, Point start, const NmParams& params = {});

enum class CgBeta { polak_ribiere_plus, none };

struct CgParams {
    std::size_t max_iters = 500;
    double grad_tol = 1e-8;
    std::size_t restart_period = 2;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    double initial_step = 1.0;
    double max_step_length = 0.25; ///< cap on the first trial displacement |alpha d|
    std::size_t max_backtracks = 60;
    CgBeta beta = CgBeta::polak_ribiere_plus;
    std::optional<Bounds> clamp;

    void validate() const;
};

struct CgResult {
    Point point;
    double value = 0.0;
    std::size_t iterations = 0;
    double grad_norm = 0.0;
    std::vector<double> step_sizes;  ///< accepted alpha per iteration
    std::string stop_reason;
};

/// Nonlinear conjugate gradient with backtracking Armijo search. Iterates are
/// projected onto `clamp`; the gradient norm used for stopping ignores
/// components pushing against an active bound.
CgResult conjugate_gd(const Objective& f, Point start, const CgParams& params = {});

}  // namespace annealbench
