#include "volfeed/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "volfeed/errors.hpp"
#include "volfeed/parallel.hpp"

namespace volfeed {

const sim_config& sim_config::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("sim_config: dt must be > 0");
    if (!(horizon >= dt))
        throw std::invalid_argument("sim_config: horizon must be >= dt");
    if (n_paths < 1) throw std::invalid_argument("sim_config: n_paths must be >= 1");
    if (!(P0 > 0.0)) throw std::invalid_argument("sim_config: P0 must be > 0");
    return *this;
}

double ou_step_exact(double x, double dt, double eps_x, double beta, double sigma_x) {
    const double decay = std::exp(-beta * dt);
    const double sd = sigma_x * std::sqrt((1.0 - decay * decay) / (2.0 * beta));
    return x * decay + sd * eps_x;
}

market_state price_step(const market_state& s, const pd_solution& sol,
                        const correlated_shocks& shocks, double dt,
                        const model_params& p) {
    double f, fx;
    sol.eval(s.x, f, fx);
    const double g = p.sigma_x * fx / f;
    const double y = sol.dividend_vol(s.x);
    const double sq = std::sqrt(dt);
    const double drift = p.r + p.gamma * s.x * s.x - 1.0 / f - 0.5 * s.x * s.x;
    market_state out;
    out.t = s.t + dt;
    out.P = s.P * std::exp(drift * dt + y * sq * shocks.eps_d + g * sq * shocks.eps_x);
    out.x = ou_step_exact(s.x, dt, shocks.eps_x, p.beta, p.sigma_x);
    out.D = out.P / sol.f(out.x);
    return out;
}

double dividend_step(double D, double x, const pd_solution& sol, double eps_d,
                     double dt, const model_params& p) {
    const double y = sol.dividend_vol(x);
    return D * std::exp((p.alpha - 0.5 * y * y) * dt + y * std::sqrt(dt) * eps_d);
}

path_set simulate_paths(const model_params& p, const pd_solution& sol,
                        const sim_config& cfg) {
    p.validate();
    cfg.validate();
    const std::size_t n_steps =
        static_cast<std::size_t>(std::llround(std::ceil(cfg.horizon / cfg.dt - 1e-9)));
    path_set out;
    out.times.resize(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k)
        out.times[k] = static_cast<double>(k) * cfg.dt;
    out.x.assign(cfg.n_paths, {});
    out.P.assign(cfg.n_paths, {});
    out.D.assign(cfg.n_paths, {});

    parallel_for(cfg.n_paths, [&](std::size_t i) {
        normal_stream rng(cfg.seed, i);
        auto &xs = out.x[i], &Ps = out.P[i], &Ds = out.D[i];
        xs.resize(n_steps + 1);
        Ps.resize(n_steps + 1);
        Ds.resize(n_steps + 1);
        market_state s{0.0, cfg.P0, cfg.P0 / sol.f(cfg.x0), cfg.x0};
        double D_direct = s.D;
        xs[0] = s.x;
        Ps[0] = s.P;
        Ds[0] = D_direct;
        for (std::size_t k = 1; k <= n_steps; ++k) {
            const correlated_shocks sh = rng.correlated_pair(p.rho_dx);
            if (cfg.direct_dividend) D_direct = dividend_step(D_direct, s.x, sol, sh.eps_d, cfg.dt, p);
            s = price_step(s, sol, sh, cfg.dt, p);
            xs[k] = s.x;
            Ps[k] = s.P;
            Ds[k] = cfg.direct_dividend ? D_direct : s.D;
        }
    });
    return out;
}

namespace {

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa <= 0.0 || sbb <= 0.0)
        throw insufficient_data("path_statistics: constant increment series");
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

path_stats path_statistics(const path_set& paths, const pd_solution& sol) {
    std::vector<double> dx2, dlnP, dlnD;
    double ratio_sum = 0.0, rho_sum = 0.0;
    std::size_t ratio_n = 0, rho_n = 0;
    for (std::size_t i = 0; i < paths.n_paths(); ++i) {
        const auto &xs = paths.x[i], &Ps = paths.P[i], &Ds = paths.D[i];
        for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
            dx2.push_back(xs[k + 1] * xs[k + 1] - xs[k] * xs[k]);
            dlnP.push_back(std::log(Ps[k + 1] / Ps[k]));
            dlnD.push_back(std::log(Ds[k + 1] / Ds[k]));
        }
        for (double x : xs) {
            if (x == 0.0) continue;  // ratio and rho_rx undefined at x = 0
            const double y = sol.dividend_vol(x);
            if (y != 0.0) {
                ratio_sum += std::fabs(x) / std::fabs(y);
                ++ratio_n;
            }
            rho_sum += sol.return_vol_correlation(x);
            ++rho_n;
        }
    }
    if (dx2.size() < 2)
        throw insufficient_data("path_statistics: need at least 2 increments");
    path_stats st;
    st.corr_dx2_dlnP = pearson(dx2, dlnP);
    st.corr_dx2_dlnD = pearson(dx2, dlnD);
    st.feedback_gap = st.corr_dx2_dlnP - st.corr_dx2_dlnD;
    st.mean_ratio_x_over_y = ratio_n ? ratio_sum / static_cast<double>(ratio_n) : 0.0;
    st.mean_rho_rx = rho_n ? rho_sum / static_cast<double>(rho_n) : 0.0;
    st.n_obs = dx2.size();
    return st;
}

}  // namespace volfeed
