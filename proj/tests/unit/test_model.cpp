#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "volfeed/errors.hpp"
#include "volfeed/model.hpp"

using volfeed::model_params;

TEST_CASE("validate accepts the base set and is idempotent") {
    const model_params p = testsupport::base_params();
    CHECK_NOTHROW(p.validate());
    const model_params& ref = p.validate().validate();
    CHECK(&ref == &p);
}

TEST_CASE("validate rejects each invariant violation with its named error") {
    model_params p = testsupport::base_params();

    SUBCASE("beta <= 0") {
        p.beta = 0.0;
        CHECK_THROWS_AS(p.validate(), volfeed::non_positive_speed);
    }
    SUBCASE("beta_q <= 0") {
        p.beta_q = -1.0;
        CHECK_THROWS_AS(p.validate(), volfeed::non_positive_speed);
    }
    SUBCASE("beta non-finite") {
        p.beta = std::nan("");
        CHECK_THROWS_AS(p.validate(), volfeed::non_positive_speed);
    }
    SUBCASE("sigma_x <= 0") {
        p.sigma_x = 0.0;
        CHECK_THROWS_AS(p.validate(), volfeed::non_positive_vol_of_vol);
    }
    SUBCASE("rho_dx out of range") {
        p.rho_dx = 1.5;
        CHECK_THROWS_AS(p.validate(), volfeed::correlation_out_of_range);
    }
    SUBCASE("rho_dx NaN") {
        p.rho_dx = std::nan("");
        CHECK_THROWS_AS(p.validate(), volfeed::correlation_out_of_range);
    }
    SUBCASE("gamma < 0") {
        p.gamma = -0.1;
        try {
            p.validate();
            FAIL("expected a domain error");
        } catch (const volfeed::domain_error& e) {
            CHECK(e.name() == "NonNegativeGamma");
        }
    }
    SUBCASE("gamma = 0 needs r > alpha") {
        p.gamma = 0.0;  // base has r = 0.02 < alpha = 0.05
        CHECK_THROWS_AS(p.validate(), volfeed::gamma_zero_requires_r_greater_alpha);
    }
    SUBCASE("rho_dx = +-1 is admissible") {
        p.rho_dx = 1.0;
        CHECK_NOTHROW(p.validate());
        p.rho_dx = -1.0;
        CHECK_NOTHROW(p.validate());
    }
}

TEST_CASE("lambda_x is beta_q - beta") {
    model_params p = testsupport::base_params();
    p.beta_q = 1.2476;
    p.beta = 1.5852;
    CHECK(p.lambda_x() == doctest::Approx(-0.3376).epsilon(1e-12));

    p.beta = p.beta_q;
    CHECK(p.lambda_x() == 0.0);
}

TEST_CASE("squared-form conversion is the exact algebraic map") {
    model_params p = testsupport::base_params();
    p.beta = 0.75;
    p.beta_q = 0.6;
    p.sigma_x = 0.3;

    const volfeed::squared_vol_params q = volfeed::to_squared_form(p);
    CHECK(q.kappa == 2.0 * p.beta);
    CHECK(q.theta == doctest::Approx(p.sigma_x * p.sigma_x / (2.0 * p.beta)).epsilon(1e-15));
    CHECK(q.sigma_h == 2.0 * p.sigma_x);
    CHECK(q.lambda_h == doctest::Approx(2.0 * (p.beta_q - p.beta)).epsilon(1e-15));

    const model_params back =
        volfeed::from_squared_form(q, p.r, p.alpha, p.gamma, p.rho_dx);
    CHECK(back.beta == doctest::Approx(p.beta).epsilon(1e-15));
    CHECK(back.beta_q == doctest::Approx(p.beta_q).epsilon(1e-15));
    CHECK(back.sigma_x == doctest::Approx(p.sigma_x).epsilon(1e-15));
    CHECK(back.r == p.r);
    CHECK(back.alpha == p.alpha);
    CHECK(back.gamma == p.gamma);
    CHECK(back.rho_dx == p.rho_dx);
}

TEST_CASE("from_squared_form validates the reconstructed parameters") {
    volfeed::squared_vol_params q;
    q.kappa = 1.0;
    q.theta = 0.04;
    q.sigma_h = 0.4;
    q.lambda_h = -2.0;  // beta_q = 0.5 - 1.0 < 0
    CHECK_THROWS_AS(volfeed::from_squared_form(q, 0.02, 0.015, 2.0, -0.5),
                    volfeed::non_positive_speed);
}
