#include "volfeed/model.hpp"

#include <cmath>

#include "volfeed/errors.hpp"

namespace volfeed {

const model_params& model_params::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw non_positive_speed("beta must be > 0, got " + std::to_string(beta));
    if (!(beta_q > 0.0) || !std::isfinite(beta_q))
        throw non_positive_speed("beta_q must be > 0, got " + std::to_string(beta_q));
    if (!(sigma_x > 0.0) || !std::isfinite(sigma_x))
        throw non_positive_vol_of_vol("sigma_x must be > 0, got " + std::to_string(sigma_x));
    if (!(std::fabs(rho_dx) <= 1.0))
        throw correlation_out_of_range("rho_dx must lie in [-1, 1], got " + std::to_string(rho_dx));
    if (gamma < 0.0 || !std::isfinite(gamma))
        throw domain_error("NonNegativeGamma", "gamma must be >= 0, got " + std::to_string(gamma));
    if (gamma == 0.0 && !(r > alpha))
        throw gamma_zero_requires_r_greater_alpha(
            "with gamma = 0 the price-dividend ratio 1/(r - alpha) requires r > alpha");
    return *this;
}

squared_vol_params to_squared_form(const model_params& p) {
    p.validate();
    return squared_vol_params{
        2.0 * p.beta,
        p.sigma_x * p.sigma_x / (2.0 * p.beta),
        2.0 * p.sigma_x,
        2.0 * (p.beta_q - p.beta),
    };
}

model_params from_squared_form(const squared_vol_params& q, double r,
                               double alpha, double gamma, double rho_dx) {
    model_params p;
    p.r = r;
    p.alpha = alpha;
    p.gamma = gamma;
    p.rho_dx = rho_dx;
    p.beta = q.kappa / 2.0;
    p.sigma_x = q.sigma_h / 2.0;
    p.beta_q = p.beta + q.lambda_h / 2.0;
    p.validate();
    return p;
}

}  // namespace volfeed
