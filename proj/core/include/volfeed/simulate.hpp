#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "volfeed/model.hpp"
#include "volfeed/pd_solution.hpp"
#include "volfeed/rng.hpp"

namespace volfeed {

struct sim_config {
    double dt = 1.0 / (24.0 * 252.0);  // hourly steps for diagnostics
    double horizon = 1.0;              // years
    std::size_t n_paths = 1;
    std::uint64_t seed = 0;
    double x0 = 0.0;
    double P0 = 100.0;
    // When set, D follows its own geometric step; by default D is derived
    // as P/f(x), which accumulates one less layer of discretization error.
    // The consistency test exercises both.
    bool direct_dividend = false;

    const sim_config& validate() const;
};

// Joint sample paths under the physical measure; row i is path i.
struct path_set {
    std::vector<double> times;               // n_steps + 1 entries
    std::vector<std::vector<double>> x;      // [path][time]
    std::vector<std::vector<double>> P;
    std::vector<std::vector<double>> D;

    std::size_t n_paths() const { return x.size(); }
    std::size_t n_steps() const { return times.empty() ? 0 : times.size() - 1; }
};

// Exact-in-distribution Ornstein-Uhlenbeck transition over dt:
//   x' = x e^{-beta dt} + sigma_x sqrt((1 - e^{-2 beta dt}) / (2 beta)) eps.
double ou_step_exact(double x, double dt, double eps_x, double beta, double sigma_x);

// One physical-measure step: log-Euler price update
//   P' = P exp[(r + gamma x^2 - 1/f(x) - x^2/2) dt
//              + y(x) sqrt(dt) eps_d + sigma_x (f_x/f)(x) sqrt(dt) eps_x],
// x via ou_step_exact with the physical beta, D' := P'/f(x').
market_state price_step(const market_state& s, const pd_solution& sol,
                        const correlated_shocks& shocks, double dt,
                        const model_params& p);

// Direct geometric dividend step:
//   D' = D exp[(alpha - y(x)^2/2) dt + y(x) sqrt(dt) eps_d].
double dividend_step(double D, double x, const pd_solution& sol, double eps_d,
                     double dt, const model_params& p);

// Generates cfg.n_paths paths of ceil-rounded cfg.horizon/cfg.dt steps.
// Path i draws from substream i of cfg.seed, so results are byte-identical
// for any worker count.
path_set simulate_paths(const model_params& p, const pd_solution& sol,
                        const sim_config& cfg);

struct path_stats {
    double corr_dx2_dlnP = 0.0;      // Corr(Delta x^2, Delta ln P)
    double corr_dx2_dlnD = 0.0;      // Corr(Delta x^2, Delta ln D)
    double feedback_gap = 0.0;       // difference of the two correlations
    double mean_ratio_x_over_y = 0.0;  // mean |x|/|y(x)| along the path
    double mean_rho_rx = 0.0;        // mean rho_rx(x) along the path
    std::size_t n_obs = 0;           // pooled increment count
};

// Pooled unconditional sample statistics plus the theoretical counterparts
// evaluated along the path. Throws insufficient_data when fewer than two
// increments exist or an increment series is constant.
path_stats path_statistics(const path_set& paths, const pd_solution& sol);

}  // namespace volfeed
