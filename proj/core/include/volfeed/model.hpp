#pragma once

#include <cmath>

namespace volfeed {

// Structural parameters of the volatility-feedback model. All rates are per
// annum; sigma_x is per sqrt(annum). beta is the physical mean-reversion
// speed of return volatility, beta_q the risk-neutral one; the volatility
// risk premium lambda_x = beta_q - beta is always derived, never stored.
struct model_params {
    double r = 0.0;        // risk-free rate, continuously compounded
    double alpha = 0.0;    // expected dividend growth rate
    double gamma = 0.0;    // price of diffusion return risk, >= 0
    double beta = 0.0;     // physical mean-reversion speed, > 0
    double beta_q = 0.0;   // risk-neutral mean-reversion speed, > 0
    double sigma_x = 0.0;  // volatility of volatility, > 0
    double rho_dx = 0.0;   // dividend/volatility correlation, in [-1, 1]

    double lambda_x() const { return beta_q - beta; }

    // Throws a named domain error on the first violated invariant and
    // returns *this unchanged otherwise (idempotent).
    const model_params& validate() const;
};

// Parameters of the equivalent squared-volatility (variance) process
// h = x^2: dh = kappa (theta - h) dt + sigma_h sqrt(h) dB.
struct squared_vol_params {
    double kappa = 0.0;     // variance mean-reversion speed
    double theta = 0.0;     // long-run variance level
    double sigma_h = 0.0;   // vol of variance
    double lambda_h = 0.0;  // variance risk premium
};

// Exact algebraic conversion: kappa = 2 beta, theta = sigma_x^2 / (2 beta),
// sigma_h = 2 sigma_x, lambda_h = 2 (beta_q - beta).
squared_vol_params to_squared_form(const model_params& p);

// Inverse of to_squared_form on the admissible set; (r, alpha, gamma,
// rho_dx) are not part of the squared form and must be supplied.
model_params from_squared_form(const squared_vol_params& q, double r,
                               double alpha, double gamma, double rho_dx);

// One (time, price, dividend rate, volatility) snapshot along a path.
// x may be negative; P = D * f(x) whenever a pd_solution is attached.
struct market_state {
    double t = 0.0;  // years
    double P = 0.0;  // stock price
    double D = 0.0;  // instantaneous dividend rate, per annum
    double x = 0.0;  // instantaneous return volatility
};

}  // namespace volfeed
