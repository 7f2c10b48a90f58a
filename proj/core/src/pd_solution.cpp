#include "volfeed/pd_solution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "volfeed/errors.hpp"

namespace volfeed {

pd_solution::pd_solution(std::vector<double> mesh, std::vector<double> f_vals,
                         std::vector<double> fx_vals, const model_params& params,
                         double residual_norm, double tol)
    : mesh_(std::move(mesh)),
      f_vals_(std::move(f_vals)),
      fx_vals_(std::move(fx_vals)),
      params_(params),
      residual_norm_(residual_norm),
      tol_(tol) {
    params_.validate();
    if (mesh_.size() < 2 || mesh_.size() != f_vals_.size() ||
        mesh_.size() != fx_vals_.size())
        throw std::invalid_argument("pd_solution: mesh/f/fx size mismatch");
    if (mesh_.front() != 0.0)
        throw std::invalid_argument("pd_solution: mesh must start at x = 0");
    for (std::size_t i = 1; i < mesh_.size(); ++i)
        if (!(mesh_[i] > mesh_[i - 1]))
            throw std::invalid_argument("pd_solution: mesh must be strictly increasing");
    for (double v : f_vals_)
        if (!(v > 0.0))
            throw no_solution("pd_solution: f must be strictly positive");
}

std::size_t pd_solution::interval(double ax) const {
    // index i with mesh[i] <= ax < mesh[i+1]; callers guarantee ax in [0, b]
    const auto it = std::upper_bound(mesh_.begin(), mesh_.end(), ax);
    std::size_t i = static_cast<std::size_t>(it - mesh_.begin());
    if (i > 0) --i;
    return std::min(i, mesh_.size() - 2);
}

void pd_solution::eval(double x, double& f_out, double& fx_out) const {
    if (constant()) {
        f_out = f_vals_.front();
        fx_out = 0.0;
        return;
    }
    const double ax = std::fabs(x);
    const double sgn = x < 0.0 ? -1.0 : 1.0;
    if (ax > b()) {
        const double g = params_.gamma;
        f_out = 1.0 / (g * ax * ax);
        fx_out = sgn * (-2.0 / (g * ax * ax * ax));
        return;
    }
    const std::size_t i = interval(ax);
    const double h = mesh_[i + 1] - mesh_[i];
    const double t = (ax - mesh_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double f0 = f_vals_[i], f1 = f_vals_[i + 1];
    const double d0 = fx_vals_[i], d1 = fx_vals_[i + 1];
    f_out = (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * h * d0 +
            (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * h * d1;
    const double der = (6 * t2 - 6 * t) * (f0 - f1) / h +
                       (3 * t2 - 4 * t + 1) * d0 + (3 * t2 - 2 * t) * d1;
    fx_out = sgn * der;
}

double pd_solution::f(double x) const {
    double fv, dv;
    eval(x, fv, dv);
    return fv;
}

double pd_solution::fx(double x) const {
    double fv, dv;
    eval(x, fv, dv);
    return dv;
}

double pd_solution::dividend_vol(double x) const {
    if (x == 0.0) return 0.0;
    double fv, dv;
    eval(x, fv, dv);
    const double g = params_.sigma_x * dv / fv;
    const double rho = params_.rho_dx;
    double arg = x * x - (1.0 - rho * rho) * g * g;
    if (arg < 0.0) {
        if (arg < -tol_)
            throw sqrt_domain_violation(
                "dividend_vol: x^2 - (1-rho^2)(sigma_x f_x/f)^2 = " +
                std::to_string(arg) + " at x = " + std::to_string(x));
        arg = 0.0;
    }
    const double sgn = x < 0.0 ? -1.0 : 1.0;
    return -rho * g + sgn * std::sqrt(arg);
}

double pd_solution::return_vol_correlation(double x) const {
    if (x == 0.0)
        throw undefined_at_zero("return_vol_correlation: 0/0 at x = 0");
    double fv, dv;
    eval(x, fv, dv);
    const double g = params_.sigma_x * dv / fv;
    const double rho = params_.rho_dx;
    const double y = dividend_vol(x);
    const double den2 = g * g + y * y + 2.0 * rho * y * g;
    if (den2 <= 0.0)
        throw undefined_at_zero("return_vol_correlation: vanishing return volatility at x = " +
                                std::to_string(x));
    const double sgn = x < 0.0 ? -1.0 : 1.0;
    double v = sgn * (g + rho * y) / std::sqrt(den2);
    return std::clamp(v, -1.0, 1.0);
}

bool pd_solution::excess_volatility_holds(double x) const {
    // Constant f (gamma = 0) has f_x = 0, so x^2 = y^2 exactly: never strict.
    if (x == 0.0 || constant()) return false;
    double fv, dv;
    eval(x, fv, dv);
    return params_.rho_dx < -params_.sigma_x * dv / (2.0 * x * fv);
}

}  // namespace volfeed
