#pragma once

#include <functional>
#include <span>
#include <vector>

namespace mixar {

struct SimplexOptions {
    double initial_step = 0.1;  ///< edge length of the starting simplex
    double xtol = 1e-8;         ///< converged when the simplex diameter drops below this
    int max_evaluations = 20000;
};

struct SimplexResult {
    std::vector<double> x;
    double fx = 0.0;
    double diameter = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Nelder-Mead minimization. Non-finite objective values are treated as +inf,
/// so infeasible points are rejected without a penalty term.
SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                          std::vector<double> start, const SimplexOptions& opts = {});

}  // namespace mixar
