#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "volfeed/model.hpp"
#include "volfeed/pd_solution.hpp"
#include "volfeed/rng.hpp"

namespace volfeed {

struct option_spec {
    double strike = 100.0;   // K >= 0; K = 0 prices the discounted stock itself
    double maturity = 1.0;   // T - t in years, > 0

    const option_spec& validate() const;
};

struct mc_config {
    std::size_t n_paths = 20000;  // total paths (pairs count double)
    double dt = 1.0 / 252.0;      // pricing-scale step
    std::uint64_t seed = 0;
    bool antithetic = true;       // n_paths must be even when set

    const mc_config& validate() const;
};

struct price_estimate {
    double price = 0.0;
    double std_error = 0.0;
    std::size_t n_effective = 0;  // IID units: pairs when antithetic, else paths
};

// One risk-neutral step: identical to price_step except the drift drops the
// gamma x^2 risk premium and x mean-reverts at beta_q instead of beta; f is
// the same solution under both measures.
market_state rn_step(const market_state& s, const pd_solution& sol,
                     const correlated_shocks& shocks, double dt,
                     const model_params& p);

// Discounted mean call payoff exp(-rT) E^Q[(P_T - K)^+] by Monte Carlo.
// Maturity is rounded to a whole number of dt steps (min 1); the discount
// uses the rounded horizon so payoff and discounting stay consistent.
// Antithetic pairs flip both shock streams; pair i uses substream i.
price_estimate price_call(const option_spec& spec, const market_state& s0,
                          const pd_solution& sol, const model_params& p,
                          const mc_config& mc);

// Zero-strike contract exp(-rT) E^Q[P_T].
price_estimate price_zero_strike(double maturity, const market_state& s0,
                                 const pd_solution& sol, const model_params& p,
                                 const mc_config& mc);

// Prices many contracts off one shared simulated path set (same s0 and
// parameters; contracts may differ in strike and maturity). This is the
// calibration working set: one path sweep per quote date.
std::vector<price_estimate> price_calls_shared(const std::vector<option_spec>& specs,
                                               const market_state& s0,
                                               const pd_solution& sol,
                                               const model_params& p,
                                               const mc_config& mc);

struct heston_reduction_report {
    price_estimate full;     // gamma = 0 constant-f machinery
    price_estimate reduced;  // direct dP = alpha P dt + x P dB twin
    double diff = 0.0;
    double combined_se = 0.0;
};

// gamma = 0 sanity check: the full engine against a direct simulation of the
// reduced Heston pair under common random numbers.
heston_reduction_report heston_reduction_check(const model_params& p,
                                               const option_spec& spec,
                                               const market_state& s0,
                                               const mc_config& mc);

// MC estimate of E^Q[e^{-rT} P_T + int_0^T e^{-rs} D_s ds], which the
// pricing identity pins at P_0. Dividend flow integrated by trapezoid.
price_estimate pricing_identity_probe(double horizon, const market_state& s0,
                                      const pd_solution& sol, const model_params& p,
                                      const mc_config& mc);

}  // namespace volfeed
