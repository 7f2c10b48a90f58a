#pragma once

#include <cstddef>
#include <vector>

#include "volfeed/model.hpp"

namespace testsupport {

// Independent low-order oracle for the price-dividend boundary value
// problem. Deliberately shares nothing with the library solver:
//   - dense uniform mesh, second-order central differences, ghost node at 0;
//   - hand-rolled Thomas tridiagonal solve;
//   - frozen-coefficient (Picard) iteration on the feedback term instead of
//     Newton, with continuation in rho_dx from the linear rho_dx = 0 solve;
//   - Richardson extrapolation across h and h/2 to cancel the leading
//     second-order error term.
struct fd_solution {
    std::vector<double> x;  // uniform nodes on [0, b]
    std::vector<double> f;

    // Value at xq by linear interpolation between the dense nodes; xq is
    // expected inside [0, b].
    double at(double xq) const;
};

// Plain second-order solve with n uniform nodes.
fd_solution fd_solve(const volfeed::model_params& p, double b, std::size_t n);

// Solves at n and 2n-1 nodes and returns (4 f_fine - f_coarse) / 3 on the
// n-node grid (classical Richardson for a second-order scheme).
fd_solution fd_solve_richardson(const volfeed::model_params& p, double b,
                                std::size_t n);

}  // namespace testsupport
