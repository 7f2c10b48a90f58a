#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace volfeed {

// One option-market observation. Dates are ISO-8601 calendar dates;
// timestamp is HH:MM or HH:MM:SS within the quote date. vol_proxy is the
// prior trading day's closing volatility-index level as a decimal.
struct option_quote {
    std::string quote_date;
    std::string timestamp;
    double spot = 0.0;
    double strike = 0.0;
    std::string expiry_date;
    double bid = 0.0;
    double ask = 0.0;
    double tbill_rate = 0.0;  // annualized, continuously compounded
    double vol_proxy = 0.0;

    double mid() const { return 0.5 * (bid + ask); }
};

// Calendar helpers (proleptic Gregorian; no holiday calendar). Trading-day
// maturity counts weekdays in (quote_date, expiry_date].
long days_from_civil(int y, unsigned m, unsigned d);
long parse_date(const std::string& iso);        // throws parse_error
int parse_time_minutes(const std::string& hm);  // minutes after midnight
int trading_days_between(const std::string& from, const std::string& to);
double year_fraction(const std::string& from, const std::string& to);  // trading days / 252

// Reads the canonical quote CSV (header required):
//   quote_date,timestamp,spot,strike,expiry_date,bid,ask,tbill_rate,vol_proxy
// Column order is free; unknown columns are ignored. Violated row
// invariants (bid > ask, vol_proxy <= 0, expiry before quote, malformed
// numbers/dates) raise parse_error with the line number.
std::vector<option_quote> load_quotes(const std::string& path);

// date,amount rows of realized cash dividends for PVDIV (optional input).
std::vector<std::pair<std::string, double>> load_dividends(const std::string& path);

struct filter_config {
    int cutoff_minutes = 15 * 60;   // drop quotes stamped after 15:00
    int min_maturity_days = 6;      // trading days
    double min_price = 0.375;       // 3/8 dollar rule on the mid
    // PVDIV source: realized dividends when provided, otherwise the flat
    // average-yield approximation spot * (1 - e^{-avg_div_yield * tau}).
    std::vector<std::pair<std::string, double>> dividends;
    double avg_div_yield = 0.0;
};

struct filter_report {
    std::size_t input = 0;
    std::size_t late_timestamp = 0;
    std::size_t short_maturity = 0;
    std::size_t low_price = 0;
    std::size_t lower_bound_violation = 0;
    std::size_t upper_bound_violation = 0;
    std::size_t retained = 0;
    std::string pvdiv_mode;  // "realized_dividends" or "average_yield"
};

// Present value of dividends paid in (quote, expiry], discounted at the
// quote's own rate.
double pv_dividends(const option_quote& q, const filter_config& cfg);

// Applies the five exclusion rules. A quote is retained iff it passes all
// of them (so the retained set is order-independent); exclusion counts are
// attributed to the first violated rule in the order listed above. The
// lower no-arbitrage bound is tested on the bid, the upper (C <= P) on the
// ask.
std::pair<std::vector<option_quote>, filter_report> apply_filters(
    const std::vector<option_quote>& quotes, const filter_config& cfg = {});

}  // namespace volfeed
