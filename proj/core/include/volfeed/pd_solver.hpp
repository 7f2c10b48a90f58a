#pragma once

#include <cstddef>

#include "volfeed/model.hpp"
#include "volfeed/pd_solution.hpp"

namespace volfeed {

struct pd_grid_config {
    double b = 5.0;               // domain truncation point
    int initial_mesh_size = 201;  // node count of the uniform starting mesh
    double tol = 1e-6;            // midpoint residual tolerance (scaled)
    double continuation_step = 0.1;  // rho_dx increment
    int max_continuation_steps = 20;
    int max_refinement_rounds = 30;      // per continuation level
    std::size_t max_nodes = 60000;       // refinement budget

    const pd_grid_config& validate() const;
};

// Solves the price-dividend boundary value problem for gamma > 0:
//   (y sigma_x rho_dx - beta x) f_x + (sigma_x^2/2) f_xx - (r + gamma x^2 - alpha) f = -1
// on [0, b] with f_x(0) = 0, f(b) = 1/(gamma b^2), and y(x) the dividend
// volatility implied by f itself (the feedback term). Hermite-Simpson
// collocation (4th order) with damped Newton, residual-driven mesh
// refinement, and parametric continuation in rho_dx from the linear
// rho_dx = 0 problem.
//
// Throws no_solution when the (gamma, alpha) pair admits no positive
// solution, mesh_refinement_exhausted when the budget runs out.
pd_solution solve_pd_ratio(const model_params& params,
                           const pd_grid_config& cfg = {});

// gamma = 0 special case: f identically 1/(r - alpha) (requires r > alpha).
pd_solution pd_ratio_constant(const model_params& params,
                              const pd_grid_config& cfg = {});

// Dispatch helper: pd_ratio_constant when gamma == 0, else solve_pd_ratio.
pd_solution solve_pd(const model_params& params, const pd_grid_config& cfg = {});

}  // namespace volfeed
