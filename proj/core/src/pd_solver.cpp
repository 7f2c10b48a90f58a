#include "volfeed/pd_solver.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "volfeed/errors.hpp"

namespace volfeed {

namespace {

constexpr double k_f_floor = 1e-10;  // any iterate below this is inadmissible

// Right-hand side of the first-order system u = (f, f_x):
//   f'' = F2(x, f, f_x) = (2/sigma_x^2) (-1 + c(x) f - conv(x, f, f_x) f_x)
// with c = r + gamma x^2 - alpha and conv = y sigma_x rho_dx - beta x.
// At rho_dx = 0 the y-term drops out and the problem is linear.
struct rhs_eval {
    double F2;
    double dF2_df;
    double dF2_dfx;
};

class collocation {
public:
    collocation(const model_params& p, double b) : p_(p), b_(b) {}

    double fb() const { return 1.0 / (p_.gamma * b_ * b_); }

    rhs_eval rhs(double x, double f, double fx, double rho) const {
        const double sx = p_.sigma_x;
        const double c = p_.r + p_.gamma * x * x - p_.alpha;
        const double k = 2.0 / (sx * sx);
        if (rho == 0.0) {
            const double conv = -p_.beta * x;
            return {k * (-1.0 + c * f - conv * fx), k * c, -k * conv};
        }
        const double fs = std::max(f, 1e-300);
        const double g = sx * fx / fs;
        const double arg = x * x - (1.0 - rho * rho) * g * g;
        double sq = 0.0, dy_dg = -rho;
        if (arg > 0.0) {
            sq = std::sqrt(arg);
            dy_dg += -(1.0 - rho * rho) * g / sq;
        }
        const double y = -rho * g + sq;  // mesh x >= 0, greater root
        const double conv = y * sx * rho - p_.beta * x;
        const double dg_df = -g / fs;
        const double dg_dfx = sx / fs;
        return {k * (-1.0 + c * f - conv * fx),
                k * (c - sx * rho * dy_dg * dg_df * fx),
                k * (-conv - sx * rho * dy_dg * dg_dfx * fx)};
    }

    // Scaled ODE residual of the Hermite interpolant at interval midpoints:
    // |R| / max(1, |convection|, |diffusion|, |reaction|). The relative
    // scaling keeps boundary layers (where individual terms are huge)
    // refinable without chasing an unattainable absolute tolerance.
    void scaled_residual(const std::vector<double>& mesh,
                         const std::vector<double>& f,
                         const std::vector<double>& fx, double rho,
                         std::vector<double>& out) const {
        const std::size_t m = mesh.size() - 1;
        out.resize(m);
        const double sx = p_.sigma_x;
        for (std::size_t i = 0; i < m; ++i) {
            const double h = mesh[i + 1] - mesh[i];
            const double xm = 0.5 * (mesh[i] + mesh[i + 1]);
            const double fm = 0.5 * (f[i] + f[i + 1]) + h / 8.0 * (fx[i] - fx[i + 1]);
            const double fxm = 1.5 * (f[i + 1] - f[i]) / h - 0.25 * (fx[i] + fx[i + 1]);
            const double fxxm = (fx[i + 1] - fx[i]) / h;
            double y = 0.0;
            if (rho != 0.0) {
                const double g = sx * fxm / std::max(std::fabs(fm), 1e-300);
                const double arg = xm * xm - (1.0 - rho * rho) * g * g;
                y = -rho * g + std::sqrt(std::max(arg, 0.0));
            }
            const double c = p_.r + p_.gamma * xm * xm - p_.alpha;
            const double t1 = (y * sx * rho - p_.beta * xm) * fxm;
            const double t2 = 0.5 * sx * sx * fxxm;
            const double t3 = -c * fm;
            const double scale = std::max({1.0, std::fabs(t1), std::fabs(t2), std::fabs(t3)});
            out[i] = std::fabs(t1 + t2 + t3 + 1.0) / scale;
        }
    }

    // Collocation residual R and banded Jacobian (kl = ku = 3) for the
    // unknown vector (f_0, fx_0, f_1, fx_1, ...). Band storage is LAPACK
    // column-major with the extra kl rows dgbsv needs for pivoting.
    void assemble(const std::vector<double>& mesh, const std::vector<double>& f,
                  const std::vector<double>& fx, double rho,
                  std::vector<double>& R, std::vector<double>& ab) const {
        const std::size_t m = mesh.size() - 1;
        const std::size_t N = 2 * (m + 1);
        R.assign(N, 0.0);
        ab.assign(ldab * N, 0.0);
        const auto put = [&](std::size_t i, std::size_t j, double v) {
            ab[j * ldab + (kl + ku + i - j)] += v;
        };

        std::vector<rhs_eval> node(m + 1);
        for (std::size_t i = 0; i <= m; ++i) node[i] = rhs(mesh[i], f[i], fx[i], rho);

        R[0] = fx[0];
        put(0, 1, 1.0);
        for (std::size_t i = 0; i < m; ++i) {
            const double h = mesh[i + 1] - mesh[i];
            const double xm = 0.5 * (mesh[i] + mesh[i + 1]);
            const double fm = 0.5 * (f[i] + f[i + 1]) + h / 8.0 * (fx[i] - fx[i + 1]);
            const double fxm = 0.5 * (fx[i] + fx[i + 1]) + h / 8.0 * (node[i].F2 - node[i + 1].F2);
            const rhs_eval mid = rhs(xm, fm, fxm, rho);

            const std::size_t ra = 1 + 2 * i, rb = 2 + 2 * i;
            const std::size_t cf0 = 2 * i, cd0 = 2 * i + 1, cf1 = 2 * i + 2, cd1 = 2 * i + 3;

            R[ra] = f[i + 1] - f[i] - h / 6.0 * (fx[i] + 4.0 * fxm + fx[i + 1]);
            R[rb] = fx[i + 1] - fx[i] - h / 6.0 * (node[i].F2 + 4.0 * mid.F2 + node[i + 1].F2);

            // d(fm)/d(col) and d(fxm)/d(col)
            const double dfm[4] = {0.5, h / 8.0, 0.5, -h / 8.0};
            const double dfxm[4] = {h / 8.0 * node[i].dF2_df,
                                    0.5 + h / 8.0 * node[i].dF2_dfx,
                                    -h / 8.0 * node[i + 1].dF2_df,
                                    0.5 - h / 8.0 * node[i + 1].dF2_dfx};
            const std::size_t cols[4] = {cf0, cd0, cf1, cd1};

            put(ra, cf1, 1.0);
            put(ra, cf0, -1.0);
            put(ra, cd0, -h / 6.0);
            put(ra, cd1, -h / 6.0);
            for (int c = 0; c < 4; ++c) put(ra, cols[c], -4.0 * h / 6.0 * dfxm[c]);

            put(rb, cd1, 1.0);
            put(rb, cd0, -1.0);
            put(rb, cf0, -h / 6.0 * node[i].dF2_df);
            put(rb, cd0, -h / 6.0 * node[i].dF2_dfx);
            put(rb, cf1, -h / 6.0 * node[i + 1].dF2_df);
            put(rb, cd1, -h / 6.0 * node[i + 1].dF2_dfx);
            for (int c = 0; c < 4; ++c)
                put(rb, cols[c], -4.0 * h / 6.0 * (mid.dF2_df * dfm[c] + mid.dF2_dfx * dfxm[c]));
        }
        R[N - 1] = f[m] - fb();
        put(N - 1, N - 2, 1.0);
    }

    static constexpr lapack_int kl = 3, ku = 3, ldab = 2 * kl + ku + 1;

private:
    model_params p_;
    double b_;
};

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

// Solves J delta = -R in place; returns false on a singular factorization.
bool banded_solve(std::vector<double>& ab, std::vector<double>& rhs) {
    const lapack_int N = static_cast<lapack_int>(rhs.size());
    std::vector<lapack_int> ipiv(N);
    for (double& v : rhs) v = -v;
    const lapack_int info =
        LAPACKE_dgbsv(LAPACK_COL_MAJOR, N, collocation::kl, collocation::ku, 1,
                      ab.data(), collocation::ldab, ipiv.data(), rhs.data(), N);
    return info == 0;
}

// Damped Newton with a residual-decrease line search. require_pos guards the
// f > k_f_floor admissibility during nonlinear (rho != 0) solves; the linear
// rho = 0 stage runs unguarded because transient negative values on a coarse
// mesh are a refinement problem, not evidence of infeasibility.
bool newton(const collocation& prob, const std::vector<double>& mesh,
            std::vector<double>& f, std::vector<double>& fx, double rho,
            bool require_pos, int max_iter) {
    std::vector<double> R, ab, Rn, abn;
    const std::size_t n = f.size();
    for (int it = 0, strikes = 0; it < max_iter; ++it) {
        prob.assemble(mesh, f, fx, rho, R, ab);
        const double rnorm = max_abs(R);
        if (!std::isfinite(rnorm)) return false;
        std::vector<double> delta = R;
        if (!banded_solve(ab, delta)) return false;

        double df_max = 0.0, dfx_max = 0.0, f_max = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            df_max = std::max(df_max, std::fabs(delta[2 * i]));
            dfx_max = std::max(dfx_max, std::fabs(delta[2 * i + 1]));
            f_max = std::max(f_max, std::fabs(f[i]));
        }
        // Step-size convergence: the residual itself bottoms out at the
        // assembly's roundoff floor, which scales with the Jacobian norm.
        const double fscale = std::max(1.0, f_max);
        if (df_max < 1e-11 * fscale && dfx_max < 1e-9 * fscale) {
            for (std::size_t i = 0; i < n; ++i) {
                f[i] += delta[2 * i];
                fx[i] += delta[2 * i + 1];
            }
            return true;
        }

        bool accepted = false;
        double lam = 1.0;
        std::vector<double> fn(n), fxn(n);
        for (int ls = 0; ls < 40; ++ls, lam *= 0.5) {
            double fmin = 1e300;
            for (std::size_t i = 0; i < n; ++i) {
                fn[i] = f[i] + lam * delta[2 * i];
                fxn[i] = fx[i] + lam * delta[2 * i + 1];
                fmin = std::min(fmin, fn[i]);
            }
            if (require_pos && fmin <= k_f_floor) continue;
            prob.assemble(mesh, fn, fxn, rho, Rn, abn);
            const double rn = max_abs(Rn);
            if (std::isfinite(rn) && rn < rnorm * (1.0 - 1e-4 * lam) + 1e-14) {
                f.swap(fn);
                fx.swap(fxn);
                accepted = true;
                break;
            }
        }
        if (accepted) {
            strikes = 0;
        } else if (++strikes >= 5) {
            return false;  // five successive failures to reduce the residual
        } else {
            for (std::size_t i = 0; i < n; ++i) {  // tiny step to escape
                f[i] += lam * delta[2 * i];
                fx[i] += lam * delta[2 * i + 1];
            }
        }
    }
    return false;
}

void hermite_resample(const std::vector<double>& xq, const std::vector<double>& mesh,
                      const std::vector<double>& f, const std::vector<double>& fx,
                      std::vector<double>& fq, std::vector<double>& fxq) {
    fq.resize(xq.size());
    fxq.resize(xq.size());
    std::size_t i = 0;
    for (std::size_t k = 0; k < xq.size(); ++k) {
        while (i + 2 < mesh.size() && mesh[i + 1] <= xq[k]) ++i;
        const double h = mesh[i + 1] - mesh[i];
        const double t = (xq[k] - mesh[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        fq[k] = (2 * t3 - 3 * t2 + 1) * f[i] + (t3 - 2 * t2 + t) * h * fx[i] +
                (-2 * t3 + 3 * t2) * f[i + 1] + (t3 - t2) * h * fx[i + 1];
        fxq[k] = (6 * t2 - 6 * t) * (f[i] - f[i + 1]) / h +
                 (3 * t2 - 4 * t + 1) * fx[i] + (3 * t2 - 2 * t) * fx[i + 1];
    }
}

struct level_state {
    std::vector<double> mesh, f, fx;
    double residual = 0.0;
};

// Newtons-then-refines until the scaled midpoint residual meets tol.
void refine_to_tol(const collocation& prob, level_state& s, double rho,
                   bool require_pos, const pd_grid_config& cfg) {
    std::vector<double> res;
    for (int round = 0; round <= cfg.max_refinement_rounds; ++round) {
        prob.scaled_residual(s.mesh, s.f, s.fx, rho, res);
        s.residual = max_abs(res);
        if (s.residual <= cfg.tol) return;
        std::size_t bad = 0;
        for (double r : res) bad += r > cfg.tol;
        if (s.mesh.size() + bad > cfg.max_nodes || round == cfg.max_refinement_rounds)
            throw mesh_refinement_exhausted(
                "solve_pd_ratio: " + std::to_string(s.mesh.size()) + " nodes, residual " +
                std::to_string(s.residual) + " > tol at rho_dx = " + std::to_string(rho));
        std::vector<double> grid;
        grid.reserve(s.mesh.size() + bad);
        for (std::size_t i = 0; i + 1 < s.mesh.size(); ++i) {
            grid.push_back(s.mesh[i]);
            if (res[i] > cfg.tol) grid.push_back(0.5 * (s.mesh[i] + s.mesh[i + 1]));
        }
        grid.push_back(s.mesh.back());
        std::vector<double> f2, fx2;
        hermite_resample(grid, s.mesh, s.f, s.fx, f2, fx2);
        if (require_pos)
            for (double& v : f2) v = std::max(v, 1e-9);
        s.mesh.swap(grid);
        s.f.swap(f2);
        s.fx.swap(fx2);
        if (!newton(prob, s.mesh, s.f, s.fx, rho, require_pos, require_pos ? 50 : 5))
            throw no_solution("solve_pd_ratio: Newton stalled on refined mesh at rho_dx = " +
                              std::to_string(rho));
    }
}

}  // namespace

const pd_grid_config& pd_grid_config::validate() const {
    if (!(b > 0.0)) throw std::invalid_argument("pd_grid_config: b must be > 0");
    if (initial_mesh_size < 11)
        throw std::invalid_argument("pd_grid_config: initial_mesh_size must be >= 11");
    if (!(tol > 0.0)) throw std::invalid_argument("pd_grid_config: tol must be > 0");
    if (!(continuation_step > 0.0 && continuation_step <= 0.25))
        throw std::invalid_argument("pd_grid_config: continuation_step must be in (0, 0.25]");
    if (max_continuation_steps < 1 || max_refinement_rounds < 1)
        throw std::invalid_argument("pd_grid_config: step/round budgets must be >= 1");
    return *this;
}

pd_solution solve_pd_ratio(const model_params& params, const pd_grid_config& cfg) {
    params.validate();
    cfg.validate();
    if (params.gamma <= 0.0)
        throw std::invalid_argument("solve_pd_ratio requires gamma > 0; use pd_ratio_constant");
    if (std::fabs(params.rho_dx) > cfg.continuation_step * cfg.max_continuation_steps)
        throw std::invalid_argument(
            "solve_pd_ratio: |rho_dx| unreachable within max_continuation_steps");

    collocation prob(params, cfg.b);
    level_state s;
    const std::size_t n0 = static_cast<std::size_t>(cfg.initial_mesh_size);
    s.mesh.resize(n0);
    for (std::size_t i = 0; i < n0; ++i)
        s.mesh[i] = cfg.b * static_cast<double>(i) / static_cast<double>(n0 - 1);
    s.f.assign(n0, std::max(prob.fb(), 1.0));
    s.fx.assign(n0, 0.0);

    // Stage 1: rho_dx = 0 is linear — Newton converges in one solve. The
    // positivity verdict waits until refinement has resolved any boundary
    // layer; a genuinely infeasible (gamma, alpha) stays negative on every
    // mesh, a layer undershoot does not.
    if (!newton(prob, s.mesh, s.f, s.fx, 0.0, false, 8))
        throw no_solution("solve_pd_ratio: linear rho_dx = 0 stage failed");
    refine_to_tol(prob, s, 0.0, false, cfg);
    if (*std::min_element(s.f.begin(), s.f.end()) <= k_f_floor)
        throw no_solution("solve_pd_ratio: f not positive at rho_dx = 0 (gamma = " +
                          std::to_string(params.gamma) + ", alpha = " +
                          std::to_string(params.alpha) + " admits no solution)");

    // Stage 2: continuation toward the target rho_dx, warm-starting Newton
    // and re-refining at each level.
    double rho = 0.0;
    const double target = params.rho_dx;
    while (rho != target) {
        const double remaining = target - rho;
        const double step = std::clamp(remaining, -cfg.continuation_step, cfg.continuation_step);
        rho = (std::fabs(remaining) <= cfg.continuation_step) ? target : rho + step;
        if (!newton(prob, s.mesh, s.f, s.fx, rho, true, 50))
            throw no_solution("solve_pd_ratio: Newton diverged at rho_dx = " +
                              std::to_string(rho));
        refine_to_tol(prob, s, rho, true, cfg);
        if (*std::min_element(s.f.begin(), s.f.end()) <= k_f_floor)
            throw no_solution("solve_pd_ratio: f not positive at rho_dx = " +
                              std::to_string(rho));
    }

    // Pin both boundary conditions exactly (solved values are O(roundoff) off).
    s.fx[0] = 0.0;
    s.f.back() = prob.fb();
    return pd_solution(std::move(s.mesh), std::move(s.f), std::move(s.fx), params,
                       s.residual, cfg.tol);
}

pd_solution pd_ratio_constant(const model_params& params, const pd_grid_config& cfg) {
    params.validate();
    cfg.validate();
    if (params.gamma != 0.0)
        throw std::invalid_argument("pd_ratio_constant requires gamma = 0");
    // validate() has already enforced r > alpha for gamma = 0
    const double value = 1.0 / (params.r - params.alpha);
    const std::size_t n = static_cast<std::size_t>(cfg.initial_mesh_size);
    std::vector<double> mesh(n), f(n, value), fx(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        mesh[i] = cfg.b * static_cast<double>(i) / static_cast<double>(n - 1);
    return pd_solution(std::move(mesh), std::move(f), std::move(fx), params, 0.0, cfg.tol);
}

pd_solution solve_pd(const model_params& params, const pd_grid_config& cfg) {
    return params.gamma == 0.0 ? pd_ratio_constant(params, cfg)
                               : solve_pd_ratio(params, cfg);
}

}  // namespace volfeed
