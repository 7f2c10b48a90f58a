#include "volfeed/calibration.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

#include "volfeed/errors.hpp"
#include "volfeed/parallel.hpp"
#include "volfeed/rng.hpp"

namespace volfeed {

namespace {

struct quote_group {
    // shared pricing state
    std::string quote_date;
    double spot = 0.0, vol_proxy = 0.0, rate = 0.0;
    std::vector<std::size_t> members;        // indices into the quote list
    std::vector<option_spec> specs;          // one per member
};

// Deterministic grouping: quotes sharing (date, spot, vol_proxy, rate) price
// off one path set; groups are ordered by that key so substream ids are
// stable under any input permutation of whole groups.
std::vector<quote_group> group_quotes(const std::vector<option_quote>& quotes) {
    std::map<std::tuple<std::string, double, double, double>, quote_group> by_key;
    for (std::size_t i = 0; i < quotes.size(); ++i) {
        const auto& q = quotes[i];
        auto& g = by_key[{q.quote_date, q.spot, q.vol_proxy, q.tbill_rate}];
        if (g.members.empty()) {
            g.quote_date = q.quote_date;
            g.spot = q.spot;
            g.vol_proxy = q.vol_proxy;
            g.rate = q.tbill_rate;
        }
        g.members.push_back(i);
        g.specs.push_back(option_spec{
            q.strike, year_fraction(q.quote_date, q.expiry_date)});
    }
    std::vector<quote_group> out;
    out.reserve(by_key.size());
    for (auto& [key, g] : by_key) out.push_back(std::move(g));
    return out;
}

}  // namespace

std::vector<double> price_residuals(const std::vector<option_quote>& quotes,
                                    const model_params& candidate,
                                    const calibration_config& cfg) {
    if (quotes.empty()) return {};
    const auto groups = group_quotes(quotes);

    // One BVP solve per distinct rate (alpha and the structure are shared).
    std::map<double, pd_solution> solutions;
    for (const auto& g : groups) {
        if (solutions.count(g.rate)) continue;
        model_params p = candidate;
        p.r = g.rate;
        p.alpha = cfg.alpha_bar;
        try {
            solutions.emplace(g.rate, solve_pd(p, cfg.grid));
        } catch (const no_solution& e) {
            throw infeasible_point(e.what());
        } catch (const mesh_refinement_exhausted& e) {
            throw infeasible_point(e.what());
        } catch (const gamma_zero_requires_r_greater_alpha& e) {
            throw infeasible_point(e.what());
        }
    }

    std::vector<double> residuals(quotes.size(), 0.0);
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    parallel_for(groups.size(), [&](std::size_t gi) {
        if (failed.load()) return;
        try {
            const auto& g = groups[gi];
            model_params p = candidate;
            p.r = g.rate;
            p.alpha = cfg.alpha_bar;
            mc_config mc = cfg.mc;
            mc.seed = substream_seed(cfg.mc.seed, gi);
            const market_state s0{0.0, g.spot, 0.0, g.vol_proxy};
            const auto estimates =
                price_calls_shared(g.specs, s0, solutions.at(g.rate), p, mc);
            for (std::size_t k = 0; k < g.members.size(); ++k)
                residuals[g.members[k]] =
                    estimates[k].price - quotes[g.members[k]].mid();
        } catch (...) {
            if (!failed.exchange(true)) first_error = std::current_exception();
        }
    });
    if (first_error) {
        try {
            std::rethrow_exception(first_error);
        } catch (const sqrt_domain_violation& e) {
            throw infeasible_point(e.what());
        }
    }
    return residuals;
}

double rmse_loss(const std::vector<option_quote>& quotes,
                 const model_params& candidate, const calibration_config& cfg) {
    if (quotes.empty())
        throw all_points_infeasible("rmse_loss: no quotes to fit");
    const auto res = price_residuals(quotes, candidate, cfg);
    double ss = 0.0;
    for (double r : res) ss += r * r;
    return std::sqrt(ss / static_cast<double>(res.size()));
}

namespace {

model_params params_from_free(const std::vector<double>& theta, bool gamma_zero,
                              double rate, double alpha_bar) {
    model_params p;
    p.r = rate;
    p.alpha = alpha_bar;
    p.beta_q = theta[0];
    p.sigma_x = theta[1];
    p.rho_dx = theta[2];
    if (gamma_zero) {
        p.beta = p.beta_q;  // lambda_x not identifiable when f is constant
        p.gamma = 0.0;
    } else {
        p.beta = p.beta_q - theta[3];
        p.gamma = theta[4];
    }
    return p;
}

}  // namespace

calibration_result calibrate(const std::vector<option_quote>& in_sample,
                             const std::vector<option_quote>& out_sample,
                             const model_params& start,
                             const calibration_config& cfg) {
    if (in_sample.empty())
        throw all_points_infeasible("calibrate: empty in-sample quote set");
    cfg.mc.validate();
    cfg.grid.validate();

    double mean_rate = 0.0;
    for (const auto& q : in_sample) mean_rate += q.tbill_rate;
    mean_rate /= static_cast<double>(in_sample.size());

    std::vector<double> theta0 = {start.beta_q, start.sigma_x, start.rho_dx};
    if (!cfg.fix_gamma_zero) {
        theta0.push_back(start.lambda_x());
        theta0.push_back(start.gamma);
    }

    const double inf = std::numeric_limits<double>::infinity();
    const auto objective = [&](const std::vector<double>& theta) -> double {
        try {
            const model_params p =
                params_from_free(theta, cfg.fix_gamma_zero, mean_rate, cfg.alpha_bar);
            p.validate();
            return rmse_loss(in_sample, p, cfg);
        } catch (const domain_error&) {
            return inf;  // InfeasiblePoint sentinel (includes invalid params)
        }
    };

    nm_result best = nelder_mead(objective, theta0, cfg.nm);
    if (cfg.restart) {
        nm_config shrunk = cfg.nm;
        shrunk.init_step = cfg.nm.init_step / 5.0;
        shrunk.init_step_abs = cfg.nm.init_step_abs / 5.0;
        nm_result second = nelder_mead(objective, best.x, shrunk);
        second.iterations += best.iterations;
        second.evaluations += best.evaluations;
        if (second.value <= best.value) best = std::move(second);
    }

    calibration_result out;
    out.params = params_from_free(best.x, cfg.fix_gamma_zero, mean_rate, cfg.alpha_bar);
    out.lambda_x_identified = !cfg.fix_gamma_zero;
    out.in_sample_rmse = best.value;
    out.out_sample_rmse = out_sample.empty()
                              ? std::numeric_limits<double>::quiet_NaN()
                              : rmse_loss(out_sample, out.params, cfg);
    out.iterations = best.iterations;
    out.evaluations = best.evaluations;
    out.converged = best.converged;

    if (cfg.compute_std_errors) {
        // Gauss-Newton: se_j = sqrt(sigma2 * ((J'J)^-1)_jj) with J the
        // forward-difference residual Jacobian at the optimum.
        const std::size_t n = in_sample.size(), k = best.x.size();
        if (n > k) {
            std::vector<double> base = price_residuals(in_sample, out.params, cfg);
            std::vector<std::vector<double>> J(k);
            bool ok = true;
            for (std::size_t j = 0; j < k && ok; ++j) {
                auto theta = best.x;
                const double h = std::max(1e-5, 5e-4 * std::fabs(theta[j]));
                theta[j] += h;
                try {
                    const auto bumped = price_residuals(
                        in_sample,
                        params_from_free(theta, cfg.fix_gamma_zero, mean_rate, cfg.alpha_bar),
                        cfg);
                    J[j].resize(n);
                    for (std::size_t i = 0; i < n; ++i)
                        J[j][i] = (bumped[i] - base[i]) / h;
                } catch (const domain_error&) {
                    ok = false;  // optimum on the feasibility boundary
                }
            }
            if (ok) {
                double rss = 0.0;
                for (double r : base) rss += r * r;
                const double sigma2 = rss / static_cast<double>(n - k);
                // normal equations, solved by Cholesky
                std::vector<double> A(k * k, 0.0);
                for (std::size_t a = 0; a < k; ++a)
                    for (std::size_t b = 0; b <= a; ++b) {
                        double s = 0.0;
                        for (std::size_t i = 0; i < n; ++i) s += J[a][i] * J[b][i];
                        A[a * k + b] = A[b * k + a] = s;
                    }
                std::vector<double> L(k * k, 0.0);
                bool spd = true;
                for (std::size_t a = 0; a < k && spd; ++a) {
                    for (std::size_t b = 0; b <= a; ++b) {
                        double s = A[a * k + b];
                        for (std::size_t c = 0; c < b; ++c) s -= L[a * k + c] * L[b * k + c];
                        if (a == b) {
                            if (s <= 0.0) { spd = false; break; }
                            L[a * k + a] = std::sqrt(s);
                        } else {
                            L[a * k + b] = s / L[b * k + b];
                        }
                    }
                }
                if (spd) {
                    // diag of (J'J)^-1 via k triangular solves of unit vectors
                    out.std_errors.resize(k);
                    std::vector<double> e(k), z(k);
                    for (std::size_t j = 0; j < k; ++j) {
                        std::fill(e.begin(), e.end(), 0.0);
                        e[j] = 1.0;
                        for (std::size_t a = 0; a < k; ++a) {
                            double s = e[a];
                            for (std::size_t c = 0; c < a; ++c) s -= L[a * k + c] * z[c];
                            z[a] = s / L[a * k + a];
                        }
                        std::vector<double> w(k);
                        for (std::size_t ai = k; ai-- > 0;) {
                            double s = z[ai];
                            for (std::size_t c = ai + 1; c < k; ++c) s -= L[c * k + ai] * w[c];
                            w[ai] = s / L[ai * k + ai];
                        }
                        out.std_errors[j] = std::sqrt(std::max(0.0, sigma2 * w[j]));
                    }
                }
            }
        }
    }
    return out;
}

double implied_vol_risk_premium(const model_params& p, const pd_solution& sol,
                                double x) {
    if (p.gamma == 0.0) return 0.0;
    if (x == 0.0)
        throw undefined_at_zero("implied_vol_risk_premium: rho_rx undefined at x = 0");
    return p.gamma * p.sigma_x * sol.return_vol_correlation(x);
}

}  // namespace volfeed
