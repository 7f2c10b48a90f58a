#include "volfeed/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "volfeed/errors.hpp"

namespace volfeed {

const nm_config& nm_config::validate() const {
    if (max_iterations < 1)
        throw std::invalid_argument("nm_config: max_iterations must be >= 1");
    if (!(x_tol > 0.0) || !(f_tol > 0.0))
        throw std::invalid_argument("nm_config: tolerances must be > 0");
    if (!(init_step > 0.0) || !(init_step_abs > 0.0))
        throw std::invalid_argument("nm_config: initial steps must be > 0");
    return *this;
}

nm_result nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                      const std::vector<double>& start, const nm_config& cfg) {
    cfg.validate();
    if (start.empty()) throw std::invalid_argument("nelder_mead: empty start point");
    const std::size_t n = start.size();
    const double inf = std::numeric_limits<double>::infinity();

    nm_result res;
    const auto eval = [&](const std::vector<double>& x) {
        ++res.evaluations;
        const double v = objective(x);
        return std::isnan(v) ? inf : v;
    };

    std::vector<std::vector<double>> simplex(n + 1, start);
    for (std::size_t j = 0; j < n; ++j)
        simplex[j + 1][j] += start[j] != 0.0 ? cfg.init_step * start[j] : cfg.init_step_abs;
    std::vector<double> value(n + 1);
    for (std::size_t i = 0; i <= n; ++i) value[i] = eval(simplex[i]);
    if (std::all_of(value.begin(), value.end(), [&](double v) { return v == inf; }))
        throw all_points_infeasible("nelder_mead: every initial simplex vertex is infeasible");

    std::vector<std::size_t> order(n + 1);
    const auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
    };

    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    for (res.iterations = 0; res.iterations < cfg.max_iterations; ++res.iterations) {
        sort_simplex();
        const std::size_t best = order[0], worst = order[n];

        double f_spread = 0.0, x_spread = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            if (value[order[i]] != inf)
                f_spread = std::max(f_spread, std::fabs(value[order[i]] - value[best]));
            else
                f_spread = inf;
            for (std::size_t j = 0; j < n; ++j)
                x_spread = std::max(x_spread,
                                    std::fabs(simplex[order[i]][j] - simplex[best][j]));
        }
        if (f_spread <= cfg.f_tol && x_spread <= cfg.x_tol) {
            res.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        for (std::size_t j = 0; j < n; ++j)
            xr[j] = centroid[j] + (centroid[j] - simplex[worst][j]);
        const double fr = eval(xr);

        if (fr < value[order[0]]) {
            for (std::size_t j = 0; j < n; ++j)
                xe[j] = centroid[j] + 2.0 * (centroid[j] - simplex[worst][j]);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = xe;
                value[worst] = fe;
            } else {
                simplex[worst] = xr;
                value[worst] = fr;
            }
        } else if (fr < value[order[n - 1]]) {
            simplex[worst] = xr;
            value[worst] = fr;
        } else {
            // contraction: outside toward xr if it improved on the worst,
            // inside toward the worst vertex otherwise
            const bool outside = fr < value[worst];
            const auto& toward = outside ? xr : simplex[worst];
            for (std::size_t j = 0; j < n; ++j)
                xc[j] = centroid[j] + 0.5 * (toward[j] - centroid[j]);
            const double fc = eval(xc);
            if (fc < (outside ? fr : value[worst])) {
                simplex[worst] = xc;
                value[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {  // shrink toward best
                    if (i == best) continue;
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[best][j] +
                                        0.5 * (simplex[i][j] - simplex[best][j]);
                    value[i] = eval(simplex[i]);
                }
            }
        }
    }

    sort_simplex();
    res.x = simplex[order[0]];
    res.value = value[order[0]];
    return res;
}

}  // namespace volfeed
