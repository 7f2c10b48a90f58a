#include "volfeed/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "volfeed/errors.hpp"
#include "volfeed/parallel.hpp"
#include "volfeed/pd_solver.hpp"
#include "volfeed/simulate.hpp"

namespace volfeed {

const option_spec& option_spec::validate() const {
    if (strike < 0.0 || !std::isfinite(strike))
        throw std::invalid_argument("option_spec: strike must be >= 0");
    if (!(maturity > 0.0))
        throw std::invalid_argument("option_spec: maturity must be > 0");
    return *this;
}

const mc_config& mc_config::validate() const {
    if (n_paths < 1) throw std::invalid_argument("mc_config: n_paths must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("mc_config: dt must be > 0");
    if (antithetic && n_paths % 2 != 0)
        throw std::invalid_argument("mc_config: n_paths must be even with antithetic variates");
    return *this;
}

market_state rn_step(const market_state& s, const pd_solution& sol,
                     const correlated_shocks& shocks, double dt,
                     const model_params& p) {
    double f, fx;
    sol.eval(s.x, f, fx);
    const double g = p.sigma_x * fx / f;
    const double y = sol.dividend_vol(s.x);
    const double sq = std::sqrt(dt);
    const double drift = p.r - 1.0 / f - 0.5 * s.x * s.x;
    market_state out;
    out.t = s.t + dt;
    out.P = s.P * std::exp(drift * dt + y * sq * shocks.eps_d + g * sq * shocks.eps_x);
    out.x = ou_step_exact(s.x, dt, shocks.eps_x, p.beta_q, p.sigma_x);
    out.D = out.P / sol.f(out.x);
    return out;
}

namespace {

struct checkpoint {
    std::size_t step;        // simulated step index
    double horizon;          // step * dt (effective maturity)
    std::vector<std::size_t> contracts;  // indices into the contract list
};

price_estimate summarize(const std::vector<double>& unit_values) {
    const std::size_t n = unit_values.size();
    double mean = 0.0;
    for (double v : unit_values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : unit_values) ss += (v - mean) * (v - mean);
    const double se = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) /
                                        static_cast<double>(n))
                            : 0.0;
    return price_estimate{mean, se, n};
}

}  // namespace

std::vector<price_estimate> price_calls_shared(const std::vector<option_spec>& specs,
                                               const market_state& s0,
                                               const pd_solution& sol,
                                               const model_params& p,
                                               const mc_config& mc) {
    p.validate();
    mc.validate();
    if (specs.empty()) return {};
    for (const auto& s : specs) s.validate();
    if (!(s0.P > 0.0))
        throw std::invalid_argument("price_calls_shared: initial price must be > 0");

    // Group contracts by rounded step count so each path is swept once.
    std::vector<checkpoint> checks;
    for (std::size_t c = 0; c < specs.size(); ++c) {
        const std::size_t steps = static_cast<std::size_t>(
            std::max<long long>(1, std::llround(specs[c].maturity / mc.dt)));
        auto it = std::find_if(checks.begin(), checks.end(),
                               [&](const checkpoint& k) { return k.step == steps; });
        if (it == checks.end()) {
            checks.push_back({steps, static_cast<double>(steps) * mc.dt, {c}});
        } else {
            it->contracts.push_back(c);
        }
    }
    std::sort(checks.begin(), checks.end(),
              [](const checkpoint& a, const checkpoint& b) { return a.step < b.step; });
    const std::size_t last_step = checks.back().step;

    const std::size_t units = mc.antithetic ? mc.n_paths / 2 : mc.n_paths;
    // payoff accumulator per contract per IID unit
    std::vector<std::vector<double>> payoff(specs.size(),
                                            std::vector<double>(units, 0.0));

    parallel_for(units, [&](std::size_t u) {
        normal_stream rng(mc.seed, u);
        market_state plus = s0, minus = s0;
        std::size_t next = 0;
        for (std::size_t k = 1; k <= last_step; ++k) {
            const correlated_shocks sh = rng.correlated_pair(p.rho_dx);
            plus = rn_step(plus, sol, sh, mc.dt, p);
            if (mc.antithetic) {
                const correlated_shocks neg{-sh.eps_d, -sh.eps_x};
                minus = rn_step(minus, sol, neg, mc.dt, p);
            }
            while (next < checks.size() && checks[next].step == k) {
                const double disc = std::exp(-p.r * checks[next].horizon);
                for (std::size_t c : checks[next].contracts) {
                    const double K = specs[c].strike;
                    double v = disc * std::max(plus.P - K, 0.0);
                    if (mc.antithetic)
                        v = 0.5 * (v + disc * std::max(minus.P - K, 0.0));
                    payoff[c][u] = v;
                }
                ++next;
            }
        }
    });

    std::vector<price_estimate> out(specs.size());
    for (std::size_t c = 0; c < specs.size(); ++c) out[c] = summarize(payoff[c]);
    return out;
}

price_estimate price_call(const option_spec& spec, const market_state& s0,
                          const pd_solution& sol, const model_params& p,
                          const mc_config& mc) {
    return price_calls_shared({spec}, s0, sol, p, mc).front();
}

price_estimate price_zero_strike(double maturity, const market_state& s0,
                                 const pd_solution& sol, const model_params& p,
                                 const mc_config& mc) {
    return price_call(option_spec{0.0, maturity}, s0, sol, p, mc);
}

heston_reduction_report heston_reduction_check(const model_params& p,
                                               const option_spec& spec,
                                               const market_state& s0,
                                               const mc_config& mc) {
    p.validate();
    if (p.gamma != 0.0)
        throw std::invalid_argument("heston_reduction_check requires gamma = 0");
    spec.validate();
    mc.validate();

    const pd_solution sol = pd_ratio_constant(p);
    heston_reduction_report rep;
    rep.full = price_call(spec, s0, sol, p, mc);

    // Reduced twin: dP = alpha P dt + x P dB, dx = -beta_q x dt + sigma_x dB^x
    // with Corr(dB, dB^x) = rho_dx, simulated log-Euler under the same
    // substreams (common random numbers).
    const std::size_t steps = static_cast<std::size_t>(
        std::max<long long>(1, std::llround(spec.maturity / mc.dt)));
    const double horizon = static_cast<double>(steps) * mc.dt;
    const double disc = std::exp(-p.r * horizon);
    const std::size_t units = mc.antithetic ? mc.n_paths / 2 : mc.n_paths;
    std::vector<double> payoff(units, 0.0);
    const double sq = std::sqrt(mc.dt);
    parallel_for(units, [&](std::size_t u) {
        normal_stream rng(mc.seed, u);
        double lp = std::log(s0.P), lm = lp;
        double xp = s0.x, xm = s0.x;
        for (std::size_t k = 0; k < steps; ++k) {
            const correlated_shocks sh = rng.correlated_pair(p.rho_dx);
            lp += (p.alpha - 0.5 * xp * xp) * mc.dt + xp * sq * sh.eps_d;
            xp = ou_step_exact(xp, mc.dt, sh.eps_x, p.beta_q, p.sigma_x);
            if (mc.antithetic) {
                lm += (p.alpha - 0.5 * xm * xm) * mc.dt - xm * sq * sh.eps_d;
                xm = ou_step_exact(xm, mc.dt, -sh.eps_x, p.beta_q, p.sigma_x);
            }
        }
        double v = disc * std::max(std::exp(lp) - spec.strike, 0.0);
        if (mc.antithetic)
            v = 0.5 * (v + disc * std::max(std::exp(lm) - spec.strike, 0.0));
        payoff[u] = v;
    });
    rep.reduced = summarize(payoff);
    rep.diff = rep.full.price - rep.reduced.price;
    rep.combined_se = std::sqrt(rep.full.std_error * rep.full.std_error +
                                rep.reduced.std_error * rep.reduced.std_error);
    return rep;
}

price_estimate pricing_identity_probe(double horizon, const market_state& s0,
                                      const pd_solution& sol, const model_params& p,
                                      const mc_config& mc) {
    p.validate();
    mc.validate();
    const std::size_t steps = static_cast<std::size_t>(
        std::max<long long>(1, std::llround(horizon / mc.dt)));
    const double T = static_cast<double>(steps) * mc.dt;
    const std::size_t units = mc.antithetic ? mc.n_paths / 2 : mc.n_paths;
    std::vector<double> value(units, 0.0);

    parallel_for(units, [&](std::size_t u) {
        normal_stream rng(mc.seed, u);
        market_state plus = s0, minus = s0;
        const double D0 = s0.P / sol.f(s0.x);
        double acc_p = 0.0, acc_m = 0.0;
        double prev_p = D0, prev_m = D0;
        for (std::size_t k = 1; k <= steps; ++k) {
            const correlated_shocks sh = rng.correlated_pair(p.rho_dx);
            plus = rn_step(plus, sol, sh, mc.dt, p);
            const double cur_p = std::exp(-p.r * plus.t) * plus.D;
            acc_p += 0.5 * (prev_p + cur_p) * mc.dt;
            prev_p = cur_p;
            if (mc.antithetic) {
                const correlated_shocks neg{-sh.eps_d, -sh.eps_x};
                minus = rn_step(minus, sol, neg, mc.dt, p);
                const double cur_m = std::exp(-p.r * minus.t) * minus.D;
                acc_m += 0.5 * (prev_m + cur_m) * mc.dt;
                prev_m = cur_m;
            }
        }
        double v = std::exp(-p.r * T) * plus.P + acc_p;
        if (mc.antithetic) v = 0.5 * (v + std::exp(-p.r * T) * minus.P + acc_m);
        value[u] = v;
    });
    return summarize(value);
}

}  // namespace volfeed
