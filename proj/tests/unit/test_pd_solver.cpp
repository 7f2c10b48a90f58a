#include <doctest.h>

#include <cmath>
#include <vector>

#include "fd_oracle.hpp"
#include "fixtures.hpp"
#include "volfeed/errors.hpp"
#include "volfeed/pd_solver.hpp"

using testsupport::base_params;
using volfeed::model_params;
using volfeed::pd_grid_config;
using volfeed::pd_solution;

namespace {

const pd_solution& anchor() {
    static const pd_solution sol = volfeed::solve_pd_ratio(base_params());
    return sol;
}

}  // namespace

TEST_CASE("grid config validation") {
    pd_grid_config g;
    CHECK_NOTHROW(g.validate());
    SUBCASE("b") {
        g.b = 0.0;
        CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    }
    SUBCASE("mesh size") {
        g.initial_mesh_size = 10;
        CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    }
    SUBCASE("tol") {
        g.tol = 0.0;
        CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    }
    SUBCASE("continuation step high") {
        g.continuation_step = 0.3;
        CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    }
    SUBCASE("continuation step zero") {
        g.continuation_step = 0.0;
        CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    }
    SUBCASE("budgets") {
        g.max_refinement_rounds = 0;
        CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    }
}

TEST_CASE("base solve hits the level anchor and meets its tolerance") {
    const pd_solution& sol = anchor();
    CHECK(std::fabs(sol.f(0.0) - 30.15) < 0.6);
    CHECK(sol.residual_norm() <= sol.tol());
    CHECK_FALSE(sol.constant());
    CHECK(sol.b() == 5.0);
}

TEST_CASE("solution invariants on the base solve") {
    const pd_solution& sol = anchor();
    const auto& mesh = sol.mesh();
    const auto& f = sol.f_vals();
    const auto& fx = sol.fx_vals();

    REQUIRE(mesh.size() == f.size());
    REQUIRE(mesh.size() == fx.size());
    CHECK(mesh.front() == 0.0);
    CHECK(mesh.back() == 5.0);
    for (std::size_t i = 0; i + 1 < mesh.size(); ++i) CHECK(mesh[i] < mesh[i + 1]);

    // f positive and non-increasing, f_x(0) = 0, f_x <= 0
    CHECK(fx[0] == 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        CHECK(f[i] > 0.0);
        CHECK(fx[i] <= 1e-12);
        if (i + 1 < f.size()) CHECK(f[i + 1] <= f[i] + 1e-12);
    }

    // far boundary pinned at the asymptote
    const double gamma = sol.params().gamma;
    CHECK(f.back() == 1.0 / (gamma * 25.0));
}

TEST_CASE("evenness and asymptotic tail of queries") {
    const pd_solution& sol = anchor();
    for (double x : {0.1, 0.37, 1.0, 2.5, 4.9}) {
        CHECK(sol.f(-x) == sol.f(x));
        CHECK(sol.fx(-x) == -sol.fx(x));
        CHECK(sol.dividend_vol(-x) == -sol.dividend_vol(x));
        CHECK(sol.return_vol_correlation(-x) == sol.return_vol_correlation(x));
    }
    CHECK(sol.dividend_vol(0.0) == 0.0);

    const double gamma = sol.params().gamma;
    CHECK(sol.f(6.0) == 1.0 / (gamma * 36.0));
    CHECK(sol.fx(6.0) == -2.0 / (gamma * 216.0));
    CHECK(sol.f(-7.0) == 1.0 / (gamma * 49.0));
    CHECK(sol.fx(-7.0) == 2.0 / (gamma * 343.0));

    // eval returns the same pair as the scalar queries
    double fv = 0.0, fxv = 0.0;
    sol.eval(0.37, fv, fxv);
    CHECK(fv == sol.f(0.37));
    CHECK(fxv == sol.fx(0.37));
}

TEST_CASE("interpolation matches nodal values exactly") {
    const pd_solution& sol = anchor();
    const auto& mesh = sol.mesh();
    for (std::size_t i = 0; i < mesh.size(); i += mesh.size() / 7 + 1) {
        CHECK(sol.f(mesh[i]) == doctest::Approx(sol.f_vals()[i]).epsilon(1e-14));
        CHECK(sol.fx(mesh[i]) == doctest::Approx(sol.fx_vals()[i]).epsilon(1e-12));
    }
}

TEST_CASE("return-variance consistency identity holds at every node") {
    const pd_solution& sol = anchor();
    const double sx = sol.params().sigma_x, rho = sol.params().rho_dx;
    for (std::size_t i = 0; i < sol.mesh().size(); ++i) {
        const double x = sol.mesh()[i];
        const double g = sx * sol.fx_vals()[i] / sol.f_vals()[i];
        const double y = sol.dividend_vol(x);
        const double rhs = y * y + g * g + 2.0 * rho * y * g;
        CHECK(std::fabs(x * x - rhs) <= 2e-6);
    }
}

TEST_CASE("return/volatility correlation is bounded, even, undefined at zero") {
    const pd_solution& sol = anchor();
    for (double x : {0.05, 0.13, 0.2, 0.5, 1.0, 3.0, 5.0})
        CHECK(std::fabs(sol.return_vol_correlation(x)) <= 1.0);
    CHECK_THROWS_AS(sol.return_vol_correlation(0.0), volfeed::undefined_at_zero);
}

TEST_CASE("dividend yield is positive and non-decreasing in |x|") {
    const pd_solution& sol = anchor();
    double prev = 0.0;
    for (double x : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) {
        const double d = sol.dividend_yield(x);
        CHECK(d > 0.0);
        CHECK(d >= prev - 1e-12);
        prev = d;
    }
}

TEST_CASE("excess volatility holds for negative correlation and matches the direct test") {
    const pd_solution& sol = anchor();  // rho_dx = -0.5 < 0
    for (double x : {0.05, 0.2, 0.5, 1.0, 3.0}) {
        CHECK(sol.excess_volatility_holds(x));
        const double y = sol.dividend_vol(x);
        CHECK((x * x > y * y) == sol.excess_volatility_holds(x));
    }
}

TEST_CASE("excess volatility with positive correlation matches the direct comparison") {
    model_params p = base_params();
    p.rho_dx = 0.5;
    const pd_solution sol = volfeed::solve_pd_ratio(p);
    for (double x : {0.05, 0.2, 0.5, 1.0, 3.0}) {
        const double y = sol.dividend_vol(x);
        CHECK(sol.excess_volatility_holds(x) == (x * x > y * y));
    }
}

TEST_CASE("infeasible and feasible (gamma, alpha) pairs") {
    model_params p = base_params();
    p.alpha = 0.08;

    p.gamma = 1.0;
    CHECK_THROWS_AS(volfeed::solve_pd_ratio(p), volfeed::no_solution);

    p.gamma = 3.0;
    const pd_solution sol = volfeed::solve_pd_ratio(p);
    CHECK(sol.f(0.0) > 0.0);
    CHECK(sol.f(0.0) == doctest::Approx(27.7007).epsilon(5e-3));
}

TEST_CASE("volatility ratio x/y exceeds 10 below 0.5 for gamma=3, alpha=0.08") {
    model_params p = base_params();
    p.gamma = 3.0;
    p.alpha = 0.08;
    const pd_solution sol = volfeed::solve_pd_ratio(p);
    for (double x : sol.mesh()) {
        if (x <= 0.0 || x >= 0.5) continue;
        CHECK(x / sol.dividend_vol(x) > 10.0);
    }
}

TEST_CASE("constant gamma=0 solution") {
    model_params p = base_params();
    p.gamma = 0.0;
    p.alpha = 0.015;
    const pd_solution sol = volfeed::pd_ratio_constant(p);
    CHECK(sol.constant());
    for (double x : {0.0, 0.2, 1.0, 4.99, 10.0, -3.0}) {
        CHECK(sol.f(x) == doctest::Approx(200.0).epsilon(1e-14));
        CHECK(sol.fx(x) == 0.0);
    }
    // equal dividend and return volatilities when f is flat
    for (double x : {0.05, 0.37, 2.0}) {
        CHECK(sol.dividend_vol(x) == doctest::Approx(x).epsilon(1e-14));
        CHECK(sol.return_vol_correlation(x) ==
              doctest::Approx(p.rho_dx).epsilon(1e-14));
        CHECK_FALSE(sol.excess_volatility_holds(x));
    }
    CHECK(sol.dividend_yield(1.7) == doctest::Approx(0.005).epsilon(1e-14));

    model_params p2 = p;
    p2.r = 0.03;
    p2.alpha = 0.01;
    CHECK(volfeed::pd_ratio_constant(p2).f(0.0) ==
          doctest::Approx(50.0).epsilon(1e-14));

    model_params bad = p;
    bad.alpha = 0.05;  // r < alpha
    CHECK_THROWS_AS(volfeed::pd_ratio_constant(bad),
                    volfeed::gamma_zero_requires_r_greater_alpha);
}

TEST_CASE("solve_pd dispatches on gamma") {
    model_params flat = base_params();
    flat.gamma = 0.0;
    flat.alpha = 0.015;
    CHECK(volfeed::solve_pd(flat).constant());

    const pd_solution sol = volfeed::solve_pd(base_params());
    CHECK_FALSE(sol.constant());
    CHECK(sol.f(0.0) == doctest::Approx(anchor().f(0.0)).epsilon(1e-12));

    CHECK_THROWS_AS(volfeed::solve_pd_ratio(flat), std::invalid_argument);
    CHECK_THROWS_AS(volfeed::pd_ratio_constant(base_params()), std::invalid_argument);
}

TEST_CASE("f decreases pointwise as gamma increases") {
    model_params p = base_params();
    std::vector<pd_solution> sols;
    for (double g : {1.0, 2.0, 3.0}) {
        p.gamma = g;
        sols.push_back(volfeed::solve_pd_ratio(p));
    }
    for (double x : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) {
        CHECK(sols[0].f(x) > sols[1].f(x));
        CHECK(sols[1].f(x) > sols[2].f(x));
    }
}

TEST_CASE("gamma -> 0 continuity at x = 0") {
    model_params p = base_params();
    p.gamma = 1e-6;
    p.alpha = 0.015;
    p.rho_dx = 0.0;
    const pd_solution sol = volfeed::solve_pd_ratio(p);
    CHECK(std::fabs(sol.f(0.0) - 200.0) / 200.0 < 0.005);
}

TEST_CASE("agrees with the independent finite-difference oracle to 4 decimals") {
    model_params p = base_params();
    p.rho_dx = 0.0;
    const pd_solution sol = volfeed::solve_pd_ratio(p);
    const testsupport::fd_solution oracle = testsupport::fd_solve_richardson(p, 5.0, 5001);
    double worst = 0.0;
    for (int j = 0; j <= 20; ++j) {
        const double x = 0.05 * j;
        worst = std::max(worst, std::fabs(sol.f(x) - oracle.at(x)));
    }
    CHECK(worst < 5e-5);
}

TEST_CASE("refinement budget exhaustion is reported") {
    pd_grid_config g;
    g.tol = 1e-9;
    g.max_nodes = 205;  // initial 201 leaves no room to refine
    CHECK_THROWS_AS(volfeed::solve_pd_ratio(base_params(), g),
                    volfeed::mesh_refinement_exhausted);
}

TEST_CASE("unreachable rho_dx is a usage error") {
    pd_grid_config g;
    g.max_continuation_steps = 2;  // 0.2 < |rho_dx| = 0.5
    CHECK_THROWS_AS(volfeed::solve_pd_ratio(base_params(), g), std::invalid_argument);
}
