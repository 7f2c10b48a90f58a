#include "volfeed/quotes.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "volfeed/errors.hpp"

namespace volfeed {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& field, std::size_t line_no, const char* what) {
    const std::string t = trim(field);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size())
        throw parse_error("line " + std::to_string(line_no) + ": bad " + what +
                          " value '" + field + "'");
    return v;
}

}  // namespace

long days_from_civil(int y, unsigned m, unsigned d) {
    // Howard Hinnant's algorithm; day 0 = 1970-01-01
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<long>(era) * 146097 + static_cast<long>(doe) - 719468;
}

long parse_date(const std::string& iso) {
    int y = 0;
    unsigned m = 0, d = 0;
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-' ||
        std::sscanf(iso.c_str(), "%4d-%2u-%2u", &y, &m, &d) != 3 || m < 1 ||
        m > 12 || d < 1 || d > 31)
        throw parse_error("bad ISO date '" + iso + "'");
    return days_from_civil(y, m, d);
}

int parse_time_minutes(const std::string& hm) {
    unsigned h = 0, m = 0, s = 0;
    const int n = std::sscanf(hm.c_str(), "%2u:%2u:%2u", &h, &m, &s);
    if (n < 2 || h > 23 || m > 59 || s > 59)
        throw parse_error("bad timestamp '" + hm + "'");
    return static_cast<int>(h * 60 + m + (s > 0 ? 1 : 0));  // any seconds => past the minute
}

namespace {

int weekday(long serial) {  // 0 = Monday ... 6 = Sunday; day 0 was a Thursday
    return static_cast<int>(((serial % 7) + 7 + 3) % 7);
}

}  // namespace

int trading_days_between(const std::string& from, const std::string& to) {
    long a = parse_date(from), b = parse_date(to);
    if (b < a) return -trading_days_between(to, from);
    int full_weeks = static_cast<int>((b - a) / 7);
    int count = full_weeks * 5;
    for (long d = a + full_weeks * 7 + 1; d <= b; ++d)
        if (weekday(d) < 5) ++count;
    return count;
}

double year_fraction(const std::string& from, const std::string& to) {
    return static_cast<double>(trading_days_between(from, to)) / 252.0;
}

std::vector<option_quote> load_quotes(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open quote file '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw parse_error("empty quote file '" + path + "'");

    static const std::array<const char*, 9> required = {
        "quote_date", "timestamp", "spot",       "strike",   "expiry_date",
        "bid",        "ask",       "tbill_rate", "vol_proxy"};
    const auto header = split_csv(line);
    std::unordered_map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[trim(header[i])] = i;
    for (const char* name : required)
        if (!col.count(name))
            throw missing_column("quote file missing column '" + std::string(name) + "'");

    std::vector<option_quote> quotes;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() < header.size())
            throw parse_error("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(header.size()) + " fields");
        option_quote q;
        q.quote_date = trim(fields[col["quote_date"]]);
        q.timestamp = trim(fields[col["timestamp"]]);
        q.spot = parse_double(fields[col["spot"]], line_no, "spot");
        q.strike = parse_double(fields[col["strike"]], line_no, "strike");
        q.expiry_date = trim(fields[col["expiry_date"]]);
        q.bid = parse_double(fields[col["bid"]], line_no, "bid");
        q.ask = parse_double(fields[col["ask"]], line_no, "ask");
        q.tbill_rate = parse_double(fields[col["tbill_rate"]], line_no, "tbill_rate");
        q.vol_proxy = parse_double(fields[col["vol_proxy"]], line_no, "vol_proxy");

        const auto fail = [&](const std::string& why) {
            throw parse_error("line " + std::to_string(line_no) + ": " + why);
        };
        long qd = 0, ed = 0;
        try {
            qd = parse_date(q.quote_date);
            ed = parse_date(q.expiry_date);
            parse_time_minutes(q.timestamp);
        } catch (const parse_error& e) {
            fail(e.what());
        }
        if (q.bid > q.ask) fail("bid > ask");
        if (q.bid < 0.0) fail("negative bid");
        if (!(q.spot > 0.0)) fail("spot must be > 0");
        if (q.strike < 0.0) fail("negative strike");
        if (!(q.vol_proxy > 0.0)) fail("vol_proxy must be > 0");
        if (ed <= qd) fail("expiry_date not after quote_date");
        quotes.push_back(std::move(q));
    }
    return quotes;
}

std::vector<std::pair<std::string, double>> load_dividends(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open dividend file '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw parse_error("empty dividend file '" + path + "'");
    const auto header = split_csv(line);
    if (header.size() < 2 || trim(header[0]) != "date" || trim(header[1]) != "amount")
        throw missing_column("dividend file must start with header 'date,amount'");
    std::vector<std::pair<std::string, double>> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() < 2)
            throw parse_error("line " + std::to_string(line_no) + ": expected date,amount");
        const std::string date = trim(fields[0]);
        parse_date(date);  // validates
        out.emplace_back(date, parse_double(fields[1], line_no, "amount"));
    }
    return out;
}

double pv_dividends(const option_quote& q, const filter_config& cfg) {
    const double tau = year_fraction(q.quote_date, q.expiry_date);
    if (cfg.dividends.empty())
        return q.spot * (1.0 - std::exp(-cfg.avg_div_yield * tau));
    const long qd = parse_date(q.quote_date);
    const long ed = parse_date(q.expiry_date);
    double pv = 0.0;
    for (const auto& [date, amount] : cfg.dividends) {
        const long dd = parse_date(date);
        if (dd > qd && dd <= ed)
            pv += amount * std::exp(-q.tbill_rate * year_fraction(q.quote_date, date));
    }
    return pv;
}

std::pair<std::vector<option_quote>, filter_report> apply_filters(
    const std::vector<option_quote>& quotes, const filter_config& cfg) {
    filter_report rep;
    rep.input = quotes.size();
    rep.pvdiv_mode = cfg.dividends.empty() ? "average_yield" : "realized_dividends";
    std::vector<option_quote> kept;
    kept.reserve(quotes.size());
    for (const auto& q : quotes) {
        if (parse_time_minutes(q.timestamp) > cfg.cutoff_minutes) {
            ++rep.late_timestamp;
            continue;
        }
        const int days = trading_days_between(q.quote_date, q.expiry_date);
        if (days < cfg.min_maturity_days) {
            ++rep.short_maturity;
            continue;
        }
        if (q.mid() < cfg.min_price) {
            ++rep.low_price;
            continue;
        }
        const double tau = static_cast<double>(days) / 252.0;
        const double lower = q.spot - pv_dividends(q, cfg) -
                             q.strike * std::exp(-q.tbill_rate * tau);
        if (q.bid < lower) {
            ++rep.lower_bound_violation;
            continue;
        }
        if (q.ask > q.spot) {
            ++rep.upper_bound_violation;
            continue;
        }
        kept.push_back(q);
    }
    rep.retained = kept.size();
    return {std::move(kept), rep};
}

}  // namespace volfeed
