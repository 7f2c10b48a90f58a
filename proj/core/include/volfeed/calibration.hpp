#pragma once

#include <string>
#include <vector>

#include "volfeed/model.hpp"
#include "volfeed/nelder_mead.hpp"
#include "volfeed/pd_solution.hpp"
#include "volfeed/pd_solver.hpp"
#include "volfeed/pricing.hpp"
#include "volfeed/quotes.hpp"

namespace volfeed {

struct calibration_config {
    double alpha_bar = 0.0613;  // average dividend growth rate (external input)
    mc_config mc;               // mc.seed is the common-random-number base
    pd_grid_config grid;
    nm_config nm;
    bool fix_gamma_zero = false;     // restricted specification: gamma = 0
    bool compute_std_errors = false; // Gauss-Newton approximation at the optimum
    bool restart = true;             // one simplex restart from the incumbent
};

// Model price minus market mid per quote, in input order. Quotes sharing
// (quote_date, spot, vol_proxy, tbill_rate) are priced off one simulated
// path set; group g draws from substream g of mc.seed regardless of thread
// count, so two evaluations at the same point are bit-identical.
// Throws infeasible_point when the BVP has no solution at these parameters.
std::vector<double> price_residuals(const std::vector<option_quote>& quotes,
                                    const model_params& candidate,
                                    const calibration_config& cfg);

// $RMSE = sqrt(mean(residual^2)) over the quotes.
double rmse_loss(const std::vector<option_quote>& quotes,
                 const model_params& candidate, const calibration_config& cfg);

struct calibration_result {
    model_params params;          // fitted; beta = beta_q - lambda_x
    bool lambda_x_identified = true;  // false in the gamma = 0 specification
    double in_sample_rmse = 0.0;
    double out_sample_rmse = 0.0;  // NaN when no out-of-sample quotes given
    // Gauss-Newton standard errors in free-parameter order
    // (beta_q, sigma_x, rho_dx[, lambda_x, gamma]); empty unless requested.
    std::vector<double> std_errors;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

// Minimizes rmse_loss over (beta_q, sigma_x, rho_dx, lambda_x, gamma) — or
// (beta_q, sigma_x, rho_dx) when fix_gamma_zero — by Nelder-Mead with the
// infeasibility sentinel, starting from `start`. r is taken per quote from
// tbill_rate and alpha from cfg.alpha_bar; the r/alpha stored in the result
// are the mean in-sample rate and alpha_bar.
calibration_result calibrate(const std::vector<option_quote>& in_sample,
                             const std::vector<option_quote>& out_sample,
                             const model_params& start,
                             const calibration_config& cfg);

// Implied volatility risk premium lambda_x(x) = gamma sigma_x rho_rx(x).
// Returns 0 for gamma = 0; undefined at x = 0.
double implied_vol_risk_premium(const model_params& p, const pd_solution& sol,
                                double x);

}  // namespace volfeed
