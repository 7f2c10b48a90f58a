#pragma once

#include <functional>
#include <vector>

namespace volfeed {

struct nm_config {
    int max_iterations = 500;   // simplex iterations (not function evals)
    double x_tol = 1e-4;        // max vertex spread, infinity norm
    double f_tol = 1e-7;        // max value spread across the simplex
    double init_step = 0.05;    // relative initial perturbation per coordinate
    double init_step_abs = 0.00025;  // used where the coordinate is zero

    const nm_config& validate() const;
};

struct nm_result {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

// Derivative-free simplex minimization (fminsearch-style coefficients:
// reflect 1, expand 2, contract 0.5, shrink 0.5). The objective may return
// +infinity as an infeasibility sentinel; if every vertex of the initial
// simplex is infeasible the search cannot move and all_points_infeasible is
// thrown. Hitting max_iterations reports converged = false rather than
// throwing, so callers keep the incumbent.
nm_result nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                      const std::vector<double>& start, const nm_config& cfg = {});

}  // namespace volfeed
