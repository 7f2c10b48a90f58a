// volfeed: batch command-line front end for the volatility-feedback library.
//
// Subcommands: solve-pd, simulate, price, calibrate, table. Configuration
// comes from a flat INI-style file ([section] + key = value), overridable
// with repeated --set section.key=value flags; model parameters also have
// direct flags of the same names. All randomness funnels through the single
// top-level `seed`. Outputs are written atomically (temp file + rename).
//
// Exit codes: 0 success, 1 domain error (error name on stderr), 2 usage.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "volfeed/calibration.hpp"
#include "volfeed/errors.hpp"
#include "volfeed/model.hpp"
#include "volfeed/parallel.hpp"
#include "volfeed/pd_solver.hpp"
#include "volfeed/pricing.hpp"
#include "volfeed/quotes.hpp"
#include "volfeed/simulate.hpp"

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- config --

// Flat "section.key" -> raw string map. Keys outside any section have no
// prefix. '#' and ';' start comments; blank lines are skipped.
using config_map = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

config_map load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config file not readable: " + path);
    config_map cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": empty key");
        cfg[section.empty() ? key : section + "." + key] = val;
    }
    return cfg;
}

void apply_overrides(config_map& cfg, const std::vector<std::string>& sets) {
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::invalid_argument("--set expects section.key=value, got: " + s);
        cfg[trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
    }
}

std::optional<std::string> get(const config_map& cfg, const std::string& key) {
    const auto it = cfg.find(key);
    if (it == cfg.end()) return std::nullopt;
    return it->second;
}

double get_double(const config_map& cfg, const std::string& key, double fallback) {
    const auto v = get(cfg, key);
    if (!v) return fallback;
    try {
        std::size_t pos = 0;
        const double d = std::stod(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument("");
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key " + key + ": not a number: " + *v);
    }
}

long long get_int(const config_map& cfg, const std::string& key, long long fallback) {
    const auto v = get(cfg, key);
    if (!v) return fallback;
    long long out = 0;
    const auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || p != v->data() + v->size())
        throw std::invalid_argument("config key " + key + ": not an integer: " + *v);
    return out;
}

bool get_bool(const config_map& cfg, const std::string& key, bool fallback) {
    const auto v = get(cfg, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw std::invalid_argument("config key " + key + ": not a boolean: " + *v);
}

// ------------------------------------------------------------- formatting --

// Shortest round-trip decimal form; keeps output byte-stable and compact.
std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

std::string fmt_fixed(double v, int digits) {
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        os << content;
        if (!os) throw std::runtime_error("cannot write " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

// ------------------------------------------------------------- assembly --

volfeed::model_params model_from_config(const config_map& cfg) {
    volfeed::model_params p;
    p.r = get_double(cfg, "model.r", 0.0);
    p.alpha = get_double(cfg, "model.alpha", 0.0);
    p.gamma = get_double(cfg, "model.gamma", 0.0);
    p.beta = get_double(cfg, "model.beta", 0.0);
    p.beta_q = get_double(cfg, "model.beta_q", p.beta);
    p.sigma_x = get_double(cfg, "model.sigma_x", 0.0);
    p.rho_dx = get_double(cfg, "model.rho_dx", 0.0);
    return p;
}

volfeed::pd_grid_config grid_from_config(const config_map& cfg) {
    volfeed::pd_grid_config g;
    g.b = get_double(cfg, "grid.b", g.b);
    g.initial_mesh_size = static_cast<int>(get_int(cfg, "grid.initial_mesh_size",
                                                   g.initial_mesh_size));
    g.tol = get_double(cfg, "grid.tol", g.tol);
    g.continuation_step = get_double(cfg, "grid.continuation_step", g.continuation_step);
    g.max_continuation_steps = static_cast<int>(get_int(cfg, "grid.max_continuation_steps",
                                                        g.max_continuation_steps));
    g.max_refinement_rounds = static_cast<int>(get_int(cfg, "grid.max_refinement_rounds",
                                                       g.max_refinement_rounds));
    g.max_nodes = static_cast<std::size_t>(get_int(cfg, "grid.max_nodes",
                                                   static_cast<long long>(g.max_nodes)));
    return g;
}

volfeed::mc_config mc_from_config(const config_map& cfg, std::uint64_t seed) {
    volfeed::mc_config mc;
    mc.n_paths = static_cast<std::size_t>(get_int(cfg, "mc.n_paths",
                                                  static_cast<long long>(mc.n_paths)));
    mc.dt = get_double(cfg, "mc.dt", mc.dt);
    mc.antithetic = get_bool(cfg, "mc.antithetic", mc.antithetic);
    mc.seed = seed;
    return mc;
}

// Stochastic subcommands refuse to run without an explicit seed.
std::uint64_t require_seed(const config_map& cfg, std::optional<std::uint64_t> flag) {
    if (flag) return *flag;
    const auto v = get(cfg, "seed");
    if (!v) throw std::invalid_argument("a seed is required: set `seed` in the config "
                                        "or pass --seed");
    return static_cast<std::uint64_t>(get_int(cfg, "seed", 0));
}

std::string output_path(const config_map& cfg, const std::string& flag_value,
                        const std::string& default_name) {
    if (!flag_value.empty()) return flag_value;
    const auto dir = get(cfg, "output_dir").value_or(".");
    return (std::filesystem::path(dir) / default_name).string();
}

// Common per-subcommand options; every subcommand shares this skeleton.
struct common_opts {
    std::string config_path;
    std::vector<std::string> sets;
    int threads = 0;
    std::optional<std::uint64_t> seed;
    std::map<std::string, double> model_flags;

    config_map resolve() const {
        config_map cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        apply_overrides(cfg, sets);
        for (const auto& [k, v] : model_flags) cfg["model." + k] = fmt(v);
        volfeed::set_max_threads(threads);
        return cfg;
    }
};

void add_common(CLI::App* cmd, common_opts& o, bool with_model_flags = true) {
    cmd->add_option("-c,--config", o.config_path, "INI-style config file");
    cmd->add_option("--set", o.sets, "override: section.key=value (repeatable)");
    cmd->add_option("--threads", o.threads, "worker thread cap (0 = hardware)");
    cmd->add_option("--seed", o.seed, "RNG seed (overrides config `seed`)");
    if (!with_model_flags) return;
    for (const char* name : {"r", "alpha", "gamma", "beta", "beta_q", "sigma_x", "rho_dx"}) {
        // capture the map slot; CLI11 stores into it only when the flag is given
        cmd->add_option_function<double>(
            std::string("--") + name,
            [&o, key = std::string(name)](double v) { o.model_flags[key] = v; },
            std::string("model parameter ") + name);
    }
}

// -------------------------------------------------------------- solve-pd --

int run_solve_pd(const common_opts& o, const std::string& out_flag) {
    const config_map cfg = o.resolve();
    const volfeed::model_params p = model_from_config(cfg);
    const volfeed::pd_grid_config grid = grid_from_config(cfg);
    const volfeed::pd_solution sol = volfeed::solve_pd(p, grid);

    std::ostringstream os;
    os << "x,f,f_x,y,rho_rx,div_yield\n";
    const auto& mesh = sol.mesh();
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const double x = mesh[i];
        const double rho_rx = x == 0.0 ? std::nan("")
                                       : sol.return_vol_correlation(x);
        os << fmt(x) << ',' << fmt(sol.f_vals()[i]) << ',' << fmt(sol.fx_vals()[i]) << ','
           << fmt(sol.dividend_vol(x)) << ',' << fmt(rho_rx) << ','
           << fmt(sol.dividend_yield(x)) << '\n';
    }
    const std::string path = output_path(cfg, out_flag, "pd_solution.csv");
    write_atomic(path, os.str());
    std::cout << "wrote " << path << " (" << mesh.size() << " nodes, f(0) = "
              << fmt(sol.f(0.0)) << ")\n";
    return 0;
}

// -------------------------------------------------------------- simulate --

int run_simulate(const common_opts& o, const std::string& out_flag,
                 const std::string& stats_flag) {
    const config_map cfg = o.resolve();
    const volfeed::model_params p = model_from_config(cfg);
    const volfeed::pd_solution sol = volfeed::solve_pd(p, grid_from_config(cfg));

    volfeed::sim_config sc;
    sc.dt = get_double(cfg, "sim.dt", sc.dt);
    sc.horizon = get_double(cfg, "sim.horizon", sc.horizon);
    sc.n_paths = static_cast<std::size_t>(get_int(cfg, "sim.n_paths",
                                                  static_cast<long long>(sc.n_paths)));
    sc.x0 = get_double(cfg, "sim.x0", sc.x0);
    sc.P0 = get_double(cfg, "sim.P0", sc.P0);
    sc.direct_dividend = get_bool(cfg, "sim.direct_dividend", sc.direct_dividend);
    sc.seed = require_seed(cfg, o.seed);

    const volfeed::path_set paths = volfeed::simulate_paths(p, sol, sc);

    std::ostringstream os;
    os << "path,t,x,x2,P,D,f,y,rho_rx\n";
    for (std::size_t i = 0; i < paths.n_paths(); ++i)
        for (std::size_t k = 0; k < paths.times.size(); ++k) {
            const double x = paths.x[i][k];
            os << i << ',' << fmt(paths.times[k]) << ',' << fmt(x) << ',' << fmt(x * x)
               << ',' << fmt(paths.P[i][k]) << ',' << fmt(paths.D[i][k]) << ','
               << fmt(sol.f(x)) << ',' << fmt(sol.dividend_vol(x)) << ','
               << fmt(x == 0.0 ? std::nan("") : sol.return_vol_correlation(x)) << '\n';
        }
    const std::string path = output_path(cfg, out_flag, "paths.csv");
    write_atomic(path, os.str());

    const volfeed::path_stats st = volfeed::path_statistics(paths, sol);
    const json stats = {
        {"corr_dx2_dlnP", st.corr_dx2_dlnP},
        {"corr_dx2_dlnD", st.corr_dx2_dlnD},
        {"feedback_gap", st.feedback_gap},
        {"mean_ratio_x_over_y", st.mean_ratio_x_over_y},
        {"mean_rho_rx", st.mean_rho_rx},
        {"n_obs", st.n_obs},
        {"n_paths", paths.n_paths()},
        {"n_steps", paths.n_steps()},
        {"dt", sc.dt},
        {"seed", sc.seed},
    };
    const std::string spath = output_path(cfg, stats_flag, "sim_stats.json");
    write_atomic(spath, stats.dump(2) + "\n");
    std::cout << "wrote " << path << " and " << spath << "\n";
    return 0;
}

// ----------------------------------------------------------------- price --

struct contract_row {
    double spot, strike, maturity_years, rate, x0;
};

std::vector<contract_row> load_contracts(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("contracts file not readable: " + path);
    std::string line;
    if (!std::getline(in, line)) throw volfeed::parse_error(path + ": empty file");
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(trim(tok));
        return out;
    };
    const std::vector<std::string> header = split(line);
    const std::vector<std::string> want = {"spot", "strike", "maturity_years", "rate", "x0"};
    std::vector<std::size_t> idx;
    for (const auto& w : want) {
        const auto it = std::find(header.begin(), header.end(), w);
        if (it == header.end()) throw volfeed::missing_column(path + ": missing column " + w);
        idx.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    std::vector<contract_row> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto f = split(line);
        if (f.size() < header.size())
            throw volfeed::parse_error(path + ":" + std::to_string(lineno) + ": short row");
        double v[5];
        for (int k = 0; k < 5; ++k) {
            const std::string& cell = f[idx[static_cast<std::size_t>(k)]];
            const auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v[k]);
            if (ec != std::errc() || p != cell.data() + cell.size())
                throw volfeed::parse_error(path + ":" + std::to_string(lineno) +
                                           ": bad number: " + cell);
        }
        rows.push_back({v[0], v[1], v[2], v[3], v[4]});
    }
    return rows;
}

int run_price(const common_opts& o, const std::string& contracts_path,
              const std::string& out_flag) {
    const config_map cfg = o.resolve();
    volfeed::model_params base = model_from_config(cfg);
    const volfeed::pd_grid_config grid = grid_from_config(cfg);
    const std::vector<contract_row> rows = load_contracts(contracts_path);
    const volfeed::mc_config mc = mc_from_config(cfg, require_seed(cfg, o.seed));

    // one BVP solve per distinct rate; one shared path sweep per (rate, spot, x0)
    std::map<double, volfeed::pd_solution> sols;
    std::map<std::tuple<double, double, double>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < rows.size(); ++i)
        groups[{rows[i].rate, rows[i].spot, rows[i].x0}].push_back(i);

    std::vector<volfeed::price_estimate> est(rows.size());
    for (const auto& [key, members] : groups) {
        const auto [rate, spot, x0] = key;
        volfeed::model_params p = base;
        p.r = rate;
        auto it = sols.find(rate);
        if (it == sols.end()) it = sols.emplace(rate, volfeed::solve_pd(p, grid)).first;
        const volfeed::pd_solution& sol = it->second;
        volfeed::market_state s0;
        s0.x = x0;
        s0.P = spot;
        s0.D = spot / sol.f(x0);
        std::vector<volfeed::option_spec> specs;
        specs.reserve(members.size());
        for (const std::size_t i : members)
            specs.push_back({rows[i].strike, rows[i].maturity_years});
        const auto prices = volfeed::price_calls_shared(specs, s0, sol, p, mc);
        for (std::size_t k = 0; k < members.size(); ++k) est[members[k]] = prices[k];
    }

    std::ostringstream os;
    os << "spot,strike,maturity_years,rate,x0,price,std_error\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
        os << fmt(rows[i].spot) << ',' << fmt(rows[i].strike) << ','
           << fmt(rows[i].maturity_years) << ',' << fmt(rows[i].rate) << ','
           << fmt(rows[i].x0) << ',' << fmt(est[i].price) << ',' << fmt(est[i].std_error)
           << '\n';
    const std::string path = output_path(cfg, out_flag, "prices.csv");
    write_atomic(path, os.str());
    std::cout << "wrote " << path << " (" << rows.size() << " contracts)\n";
    return 0;
}

// ------------------------------------------------------------- calibrate --

// "YYYY-MM-DD:YYYY-MM-DD" inclusive; ISO dates compare lexicographically.
struct date_range {
    std::string from, to;
    bool contains(const std::string& d) const { return from <= d && d <= to; }
};

date_range parse_range(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("date range must be FROM:TO, got: " + s);
    date_range r{trim(s.substr(0, colon)), trim(s.substr(colon + 1))};
    volfeed::parse_date(r.from);  // validate early
    volfeed::parse_date(r.to);
    return r;
}

json result_to_json(const volfeed::calibration_result& res,
                    const volfeed::filter_report& rep) {
    json j;
    j["parameters"] = {
        {"beta_q", res.params.beta_q},   {"sigma_x", res.params.sigma_x},
        {"rho_dx", res.params.rho_dx},   {"gamma", res.params.gamma},
        {"beta", res.params.beta},       {"lambda_x", res.params.lambda_x()},
        {"r", res.params.r},             {"alpha", res.params.alpha},
    };
    j["lambda_x_identified"] = res.lambda_x_identified;
    j["std_errors"] = res.std_errors;
    j["in_sample_rmse"] = res.in_sample_rmse;
    if (std::isfinite(res.out_sample_rmse)) j["out_sample_rmse"] = res.out_sample_rmse;
    j["iterations"] = res.iterations;
    j["evaluations"] = res.evaluations;
    j["converged"] = res.converged;
    j["filter_report"] = {
        {"input", rep.input},
        {"late_timestamp", rep.late_timestamp},
        {"short_maturity", rep.short_maturity},
        {"low_price", rep.low_price},
        {"lower_bound_violation", rep.lower_bound_violation},
        {"upper_bound_violation", rep.upper_bound_violation},
        {"retained", rep.retained},
        {"pvdiv_mode", rep.pvdiv_mode},
    };
    return j;
}

// Text table: estimates with standard errors in parentheses underneath.
std::string render_table(const json& j) {
    const json& p = j.at("parameters");
    const bool lam_id = j.value("lambda_x_identified", true);
    std::vector<std::pair<std::string, std::string>> rows;
    auto add = [&](const std::string& label, const char* key) {
        rows.emplace_back(label, fmt_fixed(p.at(key).get<double>(), 4));
    };
    add("beta_q", "beta_q");
    add("sigma_x", "sigma_x");
    add("rho_dx", "rho_dx");
    if (lam_id) {
        add("lambda_x", "lambda_x");
        add("gamma", "gamma");
        add("beta", "beta");
    }
    const std::vector<double> ses = j.value("std_errors", std::vector<double>{});

    std::ostringstream os;
    os << "parameter      estimate\n";
    os << "---------      --------\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        os << rows[i].first << std::string(15 - rows[i].first.size(), ' ')
           << rows[i].second << '\n';
        if (i < ses.size()) os << std::string(15, ' ') << '(' << fmt_fixed(ses[i], 4) << ")\n";
    }
    os << "---------      --------\n";
    os << "$RMSE (in)     " << fmt_fixed(j.at("in_sample_rmse").get<double>(), 4) << '\n';
    if (j.contains("out_sample_rmse"))
        os << "$RMSE (out)    " << fmt_fixed(j.at("out_sample_rmse").get<double>(), 4) << '\n';
    if (!lam_id) os << "lambda_x not identified (gamma = 0 specification)\n";
    return os.str();
}

int run_calibrate(const common_opts& o, const std::string& quotes_path,
                  const std::string& in_range_s, const std::string& out_range_s,
                  const std::string& out_flag) {
    const config_map cfg = o.resolve();
    const std::vector<volfeed::option_quote> raw = volfeed::load_quotes(quotes_path);

    volfeed::filter_config fc;
    if (const auto t = get(cfg, "calibration.cutoff_time"))
        fc.cutoff_minutes = volfeed::parse_time_minutes(*t);
    fc.min_maturity_days = static_cast<int>(get_int(cfg, "calibration.min_maturity_days",
                                                    fc.min_maturity_days));
    fc.min_price = get_double(cfg, "calibration.min_price", fc.min_price);
    fc.avg_div_yield = get_double(cfg, "calibration.avg_div_yield", fc.avg_div_yield);
    if (const auto d = get(cfg, "calibration.dividends_file"))
        fc.dividends = volfeed::load_dividends(*d);
    auto [retained, report] = volfeed::apply_filters(raw, fc);

    std::vector<volfeed::option_quote> in_sample, out_sample;
    if (in_range_s.empty()) {
        in_sample = std::move(retained);
    } else {
        const date_range in_r = parse_range(in_range_s);
        for (const auto& q : retained)
            if (in_r.contains(q.quote_date)) in_sample.push_back(q);
    }
    if (!out_range_s.empty()) {
        const date_range out_r = parse_range(out_range_s);
        for (const auto& q : retained)
            if (out_r.contains(q.quote_date)) out_sample.push_back(q);
    }

    volfeed::calibration_config cc;
    cc.alpha_bar = get_double(cfg, "calibration.alpha_bar", cc.alpha_bar);
    cc.fix_gamma_zero = get_bool(cfg, "calibration.fix_gamma_zero", cc.fix_gamma_zero);
    cc.compute_std_errors = get_bool(cfg, "calibration.compute_std_errors",
                                     cc.compute_std_errors);
    cc.restart = get_bool(cfg, "calibration.restart", cc.restart);
    cc.nm.max_iterations = static_cast<int>(get_int(cfg, "calibration.max_iterations",
                                                    cc.nm.max_iterations));
    cc.nm.x_tol = get_double(cfg, "calibration.x_tol", cc.nm.x_tol);
    cc.nm.f_tol = get_double(cfg, "calibration.f_tol", cc.nm.f_tol);
    cc.nm.init_step = get_double(cfg, "calibration.init_step", cc.nm.init_step);
    cc.grid = grid_from_config(cfg);
    cc.mc = mc_from_config(cfg, require_seed(cfg, o.seed));

    const volfeed::model_params start = model_from_config(cfg);
    const volfeed::calibration_result res =
        volfeed::calibrate(in_sample, out_sample, start, cc);

    const json j = result_to_json(res, report);
    const std::string path = output_path(cfg, out_flag, "calibration.json");
    write_atomic(path, j.dump(2) + "\n");
    std::cout << render_table(j) << "wrote " << path << "\n";
    return 0;
}

// ----------------------------------------------------------------- table --

int run_table(const std::string& json_path, const std::string& quotes_path) {
    if (json_path.empty() == quotes_path.empty())
        throw std::invalid_argument("table needs exactly one of: a results JSON, --quotes");
    if (!json_path.empty()) {
        std::ifstream in(json_path);
        if (!in) throw std::invalid_argument("results file not readable: " + json_path);
        json j;
        in >> j;
        std::cout << render_table(j);
        return 0;
    }
    // convenience summary: counts and average mids by moneyness and maturity
    const auto quotes = volfeed::load_quotes(quotes_path);
    const char* mlab[3] = {"P/K < 0.97", "0.97-1.03", "P/K > 1.03"};
    const char* tlab[3] = {"< 60d", "60-180d", "> 180d"};
    std::size_t count[3][3] = {};
    double sum[3][3] = {};
    for (const auto& q : quotes) {
        const double mny = q.spot / q.strike;
        const int mi = mny < 0.97 ? 0 : (mny <= 1.03 ? 1 : 2);
        const int days = volfeed::trading_days_between(q.quote_date, q.expiry_date);
        const int ti = days < 60 ? 0 : (days <= 180 ? 1 : 2);
        ++count[mi][ti];
        sum[mi][ti] += q.mid();
    }
    std::cout << "moneyness    maturity   count   avg mid\n";
    for (int mi = 0; mi < 3; ++mi)
        for (int ti = 0; ti < 3; ++ti) {
            std::ostringstream os;
            os << mlab[mi] << std::string(13 - std::string(mlab[mi]).size(), ' ')
               << tlab[ti] << std::string(11 - std::string(tlab[ti]).size(), ' ')
               << count[mi][ti];
            std::string line = os.str();
            if (count[mi][ti] > 0)
                line += std::string(line.size() < 32 ? 32 - line.size() : 1, ' ') +
                        fmt_fixed(sum[mi][ti] / static_cast<double>(count[mi][ti]), 4);
            std::cout << line << '\n';
        }
    std::cout << "total quotes: " << quotes.size() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"volatility-feedback model toolkit"};
    app.require_subcommand(1);

    common_opts o_solve, o_sim, o_price, o_cal;
    std::string out_solve, out_sim, stats_sim, out_price, out_cal;
    std::string contracts_path, quotes_path, in_range, out_range;
    std::string table_json, table_quotes;

    CLI::App* c_solve = app.add_subcommand("solve-pd", "solve the price-dividend BVP, "
                                           "write x,f,f_x,y,rho_rx,div_yield CSV");
    add_common(c_solve, o_solve);
    c_solve->add_option("-o,--out", out_solve, "output CSV path");

    CLI::App* c_sim = app.add_subcommand("simulate", "simulate joint paths, write "
                                         "per-path CSV and a JSON stats summary");
    add_common(c_sim, o_sim);
    c_sim->add_option("-o,--out", out_sim, "paths CSV path");
    c_sim->add_option("--stats-out", stats_sim, "stats JSON path");

    CLI::App* c_price = app.add_subcommand("price", "price European calls from a "
                                           "contracts CSV by Monte Carlo");
    add_common(c_price, o_price);
    c_price->add_option("--contracts", contracts_path, "CSV: spot,strike,maturity_years,rate,x0")
        ->required();
    c_price->add_option("-o,--out", out_price, "output CSV path");

    CLI::App* c_cal = app.add_subcommand("calibrate", "fit structural parameters to "
                                         "option quotes by Nelder-Mead on $RMSE");
    add_common(c_cal, o_cal);
    c_cal->add_option("--quotes", quotes_path, "quote CSV file")->required();
    c_cal->add_option("--in-sample", in_range, "in-sample date range FROM:TO");
    c_cal->add_option("--out-sample", out_range, "out-of-sample date range FROM:TO");
    c_cal->add_option("-o,--out", out_cal, "output JSON path");

    CLI::App* c_table = app.add_subcommand("table", "render a calibration result as a "
                                           "text table, or summarize a quote file");
    c_table->add_option("results", table_json, "calibration result JSON");
    c_table->add_option("--quotes", table_quotes, "quote CSV to summarize instead");

    try {
        app.parse(argc, argv);
        if (*c_solve) return run_solve_pd(o_solve, out_solve);
        if (*c_sim) return run_simulate(o_sim, out_sim, stats_sim);
        if (*c_price) return run_price(o_price, contracts_path, out_price);
        if (*c_cal) return run_calibrate(o_cal, quotes_path, in_range, out_range, out_cal);
        if (*c_table) return run_table(table_json, table_quotes);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    } catch (const volfeed::domain_error& e) {
        std::cerr << e.name() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
