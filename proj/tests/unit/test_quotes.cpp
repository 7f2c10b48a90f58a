#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "volfeed/errors.hpp"
#include "volfeed/quotes.hpp"

using volfeed::filter_config;
using volfeed::option_quote;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

option_quote clean_quote() {
    option_quote q;
    q.quote_date = "1995-06-05";  // a Monday
    q.timestamp = "10:00";
    q.spot = 100.0;
    q.strike = 100.0;
    q.expiry_date = "1995-07-05";  // 22 trading days out
    q.bid = 2.0;
    q.ask = 2.2;
    q.tbill_rate = 0.05;
    q.vol_proxy = 0.2;
    return q;
}

}  // namespace

TEST_CASE("calendar arithmetic on weekdays") {
    CHECK(volfeed::trading_days_between("1995-06-05", "1995-06-09") == 4);
    CHECK(volfeed::trading_days_between("1995-06-05", "1995-06-12") == 5);
    CHECK(volfeed::trading_days_between("1995-06-09", "1995-06-12") == 1);
    CHECK(volfeed::trading_days_between("1995-06-05", "1995-06-05") == 0);
    CHECK(volfeed::trading_days_between("1995-06-10", "1995-06-12") == 1);  // from a Saturday
    CHECK(volfeed::trading_days_between("1995-06-12", "1995-06-05") == -5);
    CHECK(volfeed::trading_days_between("1995-06-05", "1995-07-05") == 22);
    CHECK(volfeed::year_fraction("1995-06-05", "1995-07-05") ==
          doctest::Approx(22.0 / 252.0).epsilon(1e-15));
}

TEST_CASE("date and time parsing") {
    CHECK(volfeed::parse_date("1970-01-01") == 0);
    CHECK(volfeed::parse_date("1995-06-05") == 9286);
    CHECK_THROWS_AS(volfeed::parse_date("1995-13-01"), volfeed::parse_error);
    CHECK_THROWS_AS(volfeed::parse_date("95-06-05"), volfeed::parse_error);
    CHECK_THROWS_AS(volfeed::parse_date("1995/06/05"), volfeed::parse_error);

    CHECK(volfeed::parse_time_minutes("15:00") == 900);
    CHECK(volfeed::parse_time_minutes("09:30") == 570);
    CHECK(volfeed::parse_time_minutes("15:00:30") == 901);  // seconds round up
    CHECK_THROWS_AS(volfeed::parse_time_minutes("25:00"), volfeed::parse_error);
    CHECK_THROWS_AS(volfeed::parse_time_minutes("noon"), volfeed::parse_error);
}

TEST_CASE("load_quotes reads a well-formed file with free column order") {
    const std::string path = write_temp(
        "vf_quotes_ok.csv",
        "vol_proxy,quote_date,timestamp,spot,strike,expiry_date,bid,ask,tbill_rate,note\n"
        "0.20,1995-06-05,10:00,100,95,1995-07-05,5.5,5.75,0.05,ignored\n"
        "0.21,1995-06-05,10:05,100,100,1995-07-05,2.0,2.25,0.05,ignored\n"
        "0.22,1995-06-06,11:00,101,105,1995-08-04,1.0,1.125,0.051,ignored\n");
    const auto quotes = volfeed::load_quotes(path);
    REQUIRE(quotes.size() == 3);
    CHECK(quotes[0].vol_proxy == 0.20);
    CHECK(quotes[0].strike == 95.0);
    CHECK(quotes[0].mid() == doctest::Approx(5.625).epsilon(1e-15));
    CHECK(quotes[2].quote_date == "1995-06-06");
    CHECK(quotes[2].tbill_rate == 0.051);
}

TEST_CASE("load_quotes rejects malformed inputs with line numbers") {
    SUBCASE("bid > ask") {
        const std::string path = write_temp(
            "vf_quotes_bidask.csv",
            "quote_date,timestamp,spot,strike,expiry_date,bid,ask,tbill_rate,vol_proxy\n"
            "1995-06-05,10:00,100,100,1995-07-05,2.0,2.25,0.05,0.2\n"
            "1995-06-05,10:00,100,100,1995-07-05,3.0,2.25,0.05,0.2\n");
        try {
            volfeed::load_quotes(path);
            FAIL("expected parse_error");
        } catch (const volfeed::parse_error& e) {
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
            CHECK(std::string(e.what()).find("bid > ask") != std::string::npos);
        }
    }
    SUBCASE("missing column") {
        const std::string path = write_temp(
            "vf_quotes_nocol.csv",
            "quote_date,timestamp,spot,strike,expiry_date,bid,ask,tbill_rate\n"
            "1995-06-05,10:00,100,100,1995-07-05,2.0,2.25,0.05\n");
        try {
            volfeed::load_quotes(path);
            FAIL("expected missing_column");
        } catch (const volfeed::missing_column& e) {
            CHECK(std::string(e.what()).find("vol_proxy") != std::string::npos);
        }
    }
    SUBCASE("bad number") {
        const std::string path = write_temp(
            "vf_quotes_badnum.csv",
            "quote_date,timestamp,spot,strike,expiry_date,bid,ask,tbill_rate,vol_proxy\n"
            "1995-06-05,10:00,100,oops,1995-07-05,2.0,2.25,0.05,0.2\n");
        try {
            volfeed::load_quotes(path);
            FAIL("expected parse_error");
        } catch (const volfeed::parse_error& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
            CHECK(std::string(e.what()).find("strike") != std::string::npos);
        }
    }
    SUBCASE("expiry before quote") {
        const std::string path = write_temp(
            "vf_quotes_expiry.csv",
            "quote_date,timestamp,spot,strike,expiry_date,bid,ask,tbill_rate,vol_proxy\n"
            "1995-06-05,10:00,100,100,1995-06-02,2.0,2.25,0.05,0.2\n");
        CHECK_THROWS_AS(volfeed::load_quotes(path), volfeed::parse_error);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(volfeed::load_quotes("/nonexistent/quotes.csv"),
                        volfeed::parse_error);
    }
}

TEST_CASE("load_dividends") {
    const std::string path = write_temp("vf_divs.csv",
                                        "date,amount\n"
                                        "1995-06-15,0.55\n"
                                        "1995-09-15,0.60\n");
    const auto divs = volfeed::load_dividends(path);
    REQUIRE(divs.size() == 2);
    CHECK(divs[0].first == "1995-06-15");
    CHECK(divs[1].second == 0.60);

    const std::string bad = write_temp("vf_divs_bad.csv", "when,amount\n");
    CHECK_THROWS_AS(volfeed::load_dividends(bad), volfeed::missing_column);
}

TEST_CASE("pv_dividends in both modes") {
    const option_quote q = clean_quote();

    filter_config avg;
    avg.avg_div_yield = 0.02;
    const double tau = 22.0 / 252.0;
    CHECK(volfeed::pv_dividends(q, avg) ==
          doctest::Approx(100.0 * (1.0 - std::exp(-0.02 * tau))).epsilon(1e-12));

    filter_config realized;
    realized.dividends = {{"1995-06-15", 1.0},   // inside (quote, expiry]
                          {"1995-08-01", 2.0},   // after expiry
                          {"1995-06-05", 5.0}};  // on the quote date: excluded
    const double tau_pay = 8.0 / 252.0;  // trading days to 1995-06-15
    CHECK(volfeed::pv_dividends(q, realized) ==
          doctest::Approx(std::exp(-0.05 * tau_pay)).epsilon(1e-12));
}

TEST_CASE("filters: per-rule attribution and conservation of counts") {
    std::vector<option_quote> quotes;
    quotes.push_back(clean_quote());

    option_quote late = clean_quote();
    late.timestamp = "15:01";
    quotes.push_back(late);

    option_quote short_mat = clean_quote();
    short_mat.expiry_date = "1995-06-12";  // 5 trading days
    quotes.push_back(short_mat);

    option_quote cheap = clean_quote();
    cheap.strike = 120.0;  // keeps the lower bound vacuous
    cheap.bid = 0.25;
    cheap.ask = 0.35;  // mid 0.30 < 3/8
    quotes.push_back(cheap);

    option_quote below_bound = clean_quote();
    below_bound.strike = 50.0;
    below_bound.bid = 45.0;  // lower bound ~ 50.2
    below_bound.ask = 46.0;
    quotes.push_back(below_bound);

    option_quote above_spot = clean_quote();
    above_spot.bid = 99.0;
    above_spot.ask = 101.0;  // ask > spot
    quotes.push_back(above_spot);

    quotes.push_back(clean_quote());

    const auto [kept, rep] = volfeed::apply_filters(quotes);
    CHECK(rep.input == 7);
    CHECK(rep.retained == 2);
    CHECK(kept.size() == 2);
    CHECK(rep.late_timestamp == 1);
    CHECK(rep.short_maturity == 1);
    CHECK(rep.low_price == 1);
    CHECK(rep.lower_bound_violation == 1);
    CHECK(rep.upper_bound_violation == 1);
    CHECK(rep.retained + rep.late_timestamp + rep.short_maturity + rep.low_price +
              rep.lower_bound_violation + rep.upper_bound_violation ==
          rep.input);
    CHECK(rep.pvdiv_mode == "average_yield");

    SUBCASE("a 15:00 stamp is not late; seconds past it are") {
        option_quote edge = clean_quote();
        edge.timestamp = "15:00";
        auto [k1, r1] = volfeed::apply_filters({edge});
        CHECK(r1.retained == 1);
        edge.timestamp = "15:00:30";
        auto [k2, r2] = volfeed::apply_filters({edge});
        CHECK(r2.late_timestamp == 1);
    }

    SUBCASE("multiple violations count toward the first rule") {
        option_quote both = clean_quote();
        both.timestamp = "16:00";
        both.ask = 150.0;
        both.bid = 120.0;
        auto [k, r] = volfeed::apply_filters({both});
        CHECK(r.late_timestamp == 1);
        CHECK(r.upper_bound_violation == 0);
    }

    SUBCASE("retained set is permutation-invariant") {
        std::vector<option_quote> reversed(quotes.rbegin(), quotes.rend());
        const auto [kept_r, rep_r] = volfeed::apply_filters(reversed);
        CHECK(rep_r.retained == rep.retained);
        CHECK(rep_r.late_timestamp == rep.late_timestamp);
        CHECK(rep_r.short_maturity == rep.short_maturity);
        CHECK(rep_r.low_price == rep.low_price);
        CHECK(rep_r.lower_bound_violation == rep.lower_bound_violation);
        CHECK(rep_r.upper_bound_violation == rep.upper_bound_violation);
        auto key = [](const option_quote& q) {
            return std::make_tuple(q.quote_date, q.strike, q.bid, q.ask);
        };
        std::vector<std::tuple<std::string, double, double, double>> a, b;
        for (const auto& q : kept) a.push_back(key(q));
        for (const auto& q : kept_r) b.push_back(key(q));
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a == b);
    }
}

TEST_CASE("realized dividends shift the lower-bound screen") {
    // deep ITM quote right at the boundary: PVDIV pushes the bound below bid
    option_quote q = clean_quote();
    q.strike = 50.0;
    q.bid = 49.5;
    q.ask = 50.0;

    filter_config no_div;
    auto [k1, r1] = volfeed::apply_filters({q}, no_div);
    CHECK(r1.lower_bound_violation == 1);  // bound ~ 50.2 > bid

    filter_config with_div;
    with_div.dividends = {{"1995-06-15", 1.0}};
    auto [k2, r2] = volfeed::apply_filters({q}, with_div);
    CHECK(r2.retained == 1);  // bound ~ 49.2 < bid
    CHECK(r2.pvdiv_mode == "realized_dividends");
}
