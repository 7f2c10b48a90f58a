#pragma once

#include <cstddef>
#include <vector>

#include "volfeed/model.hpp"

namespace volfeed {

// Tabulated price-dividend ratio f on [0, b] with nodal derivatives f_x.
// Immutable after construction; all queries are read-only and reentrant.
//
// Query contract:
//   - between nodes: cubic Hermite interpolation using the stored slopes
//     (f is never differentiated numerically);
//   - x < 0: evenness, f(-x) = f(x) and f_x(-x) = -f_x(x);
//   - |x| > b: asymptotic tail f = 1/(gamma x^2), f_x = -2/(gamma x^3);
//   - gamma = 0 solutions are constant everywhere (no tail formula).
class pd_solution {
public:
    pd_solution(std::vector<double> mesh, std::vector<double> f_vals,
                std::vector<double> fx_vals, const model_params& params,
                double residual_norm, double tol);

    const std::vector<double>& mesh() const { return mesh_; }
    const std::vector<double>& f_vals() const { return f_vals_; }
    const std::vector<double>& fx_vals() const { return fx_vals_; }
    const model_params& params() const { return params_; }
    double residual_norm() const { return residual_norm_; }
    double tol() const { return tol_; }
    double b() const { return mesh_.back(); }
    bool constant() const { return params_.gamma == 0.0; }

    double f(double x) const;
    double fx(double x) const;
    void eval(double x, double& f_out, double& fx_out) const;  // one lookup

    // Dividend growth volatility y(x), the greater root consistent with the
    // return-variance identity, so that sign(y) = sign(x) and y(0) = 0.
    // Sqrt arguments in [-tol, 0) are clamped to zero; below -tol the
    // solution is internally inconsistent.
    double dividend_vol(double x) const;

    // Correlation between instantaneous returns and volatility shocks;
    // even in x, undefined at x = 0 (0/0).
    double return_vol_correlation(double x) const;

    double dividend_yield(double x) const { return 1.0 / f(x); }

    // True iff rho_dx < -sigma_x f_x / (2 x f), i.e. x^2 > y(x)^2 (x > 0).
    bool excess_volatility_holds(double x) const;

private:
    std::size_t interval(double ax) const;

    std::vector<double> mesh_, f_vals_, fx_vals_;
    model_params params_;
    double residual_norm_ = 0.0;
    double tol_ = 1e-6;
};

}  // namespace volfeed
