#pragma once

#include "volfeed/model.hpp"

namespace testsupport {

// Base parameter set shared across suites: gamma = 2, alpha = 0.05,
// r = 0.02, beta = beta_q = 0.5, sigma_x = 0.2, rho_dx = -0.5.
inline volfeed::model_params base_params() {
    volfeed::model_params p;
    p.r = 0.02;
    p.alpha = 0.05;
    p.gamma = 2.0;
    p.beta = 0.5;
    p.beta_q = 0.5;
    p.sigma_x = 0.2;
    p.rho_dx = -0.5;
    return p;
}

// Pricing-study variant: same dynamics, alpha = 0.015 (feasible down to
// gamma = 0 since r > alpha).
inline volfeed::model_params pricing_params() {
    volfeed::model_params p = base_params();
    p.alpha = 0.015;
    return p;
}

}  // namespace testsupport
