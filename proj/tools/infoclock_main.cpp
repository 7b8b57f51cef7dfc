// Command-line surface: config ingestion, experiment orchestration and
// CSV/JSON emission. Exit codes: 0 success, 2 config error, 3 ill-posed
// problem, 4 solver failure. stdout carries nothing when --out is given;
// diagnostics go to stderr.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "infoclock/infoclock.hpp"

namespace {

using namespace infoclock;

struct CommonOpts {
    std::string config_path;
    std::string clock_spec = "natural";
    std::string out_path;
    std::uint64_t seed = 42;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file (defaults used if absent)");
    cmd->add_option("--clock", opts.clock_spec,
                    "clock spec: natural | linear:k=<float> | grid:<path.csv>");
    cmd->add_option("--out", opts.out_path, "output file (stdout stays silent when set)");
    cmd->add_option("--seed", opts.seed, "master seed (env INFOCLOCK_SEED overrides)");
}

RunConfig config_for(const CommonOpts& opts) {
    if (opts.config_path.empty()) return default_config();
    return load_config(opts.config_path);
}

std::string sidecar_path(const std::string& out) {
    if (out.size() > 4 && out.substr(out.size() - 4) == ".csv") {
        return out.substr(0, out.size() - 4) + ".json";
    }
    return out + ".json";
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file " + path);
    f << j.dump(2) << "\n";
}

void emit_csv_or_stdout(const std::string& out, const CsvTable& table) {
    if (!out.empty()) {
        write_csv(out, table);
        return;
    }
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        std::cout << (i ? "," : "") << table.header[i];
    }
    std::cout << "\n";
    std::size_t rows = table.columns.empty() ? 0 : table.columns[0].size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            std::cout << (c ? "," : "") << format_number(table.columns[c][r]);
        }
        std::cout << "\n";
    }
}

struct SweepSpec {
    double lo = 1.0;
    double hi = 10.0;
    int n = 10;
};

SweepSpec parse_sweep(const std::string& text) {
    SweepSpec s;
    if (text.rfind("k=", 0) != 0) throw ConfigError("--sweep must look like k=<lo>:<hi>:<n>");
    std::string body = text.substr(2);
    std::size_t c1 = body.find(':');
    std::size_t c2 = body.find(':', c1 == std::string::npos ? 0 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
        throw ConfigError("--sweep must look like k=<lo>:<hi>:<n>");
    }
    try {
        s.lo = std::stod(body.substr(0, c1));
        s.hi = std::stod(body.substr(c1 + 1, c2 - c1 - 1));
        s.n = std::stoi(body.substr(c2 + 1));
    } catch (const std::exception&) {
        throw ConfigError("--sweep must look like k=<lo>:<hi>:<n>");
    }
    if (s.n < 1 || !(s.lo >= 1.0) || !(s.hi >= s.lo)) {
        throw ConfigError("--sweep needs 1 <= lo <= hi and n >= 1");
    }
    return s;
}

Strategy parse_strategy(const std::string& text) {
    if (text == "zero") return ZeroStrategy{};
    if (text == "optimal") return OptimalClosedForm{};
    if (text.rfind("fraction:k=", 0) == 0) {
        return ConstantFraction{std::stod(text.substr(11))};
    }
    if (text.rfind("scaled:f=", 0) == 0) {
        return ScaledOptimal{std::stod(text.substr(9))};
    }
    throw ConfigError("--strategy must be zero | optimal | fraction:k=<v> | scaled:f=<v>");
}

int cmd_value(const CommonOpts& opts, const std::string& sweep_text, bool defaults) {
    RunConfig cfg = defaults && opts.config_path.empty() ? default_config() : config_for(opts);
    require_well_posed(cfg.market, cfg.utility);

    CsvTable table;
    nlohmann::json sidecar = config_to_json(cfg);
    if (!sweep_text.empty() || defaults) {
        SweepSpec sweep = sweep_text.empty() ? SweepSpec{} : parse_sweep(sweep_text);
        table.header = {"k", "value", "cost", "net"};
        table.columns.resize(4);
        for (int i = 0; i < sweep.n; ++i) {
            double k = sweep.n == 1 ? sweep.lo
                                    : sweep.lo + (sweep.hi - sweep.lo) * i / (sweep.n - 1);
            InformativeClock clock = InformativeClock::linear(cfg.market.t0(), k);
            InfoValuation val = net_value(cfg.market, cfg.utility, cfg.cost, clock);
            table.columns[0].push_back(k);
            table.columns[1].push_back(val.value);
            table.columns[2].push_back(val.cost);
            table.columns[3].push_back(val.net);
        }
        sidecar["sweep"] = {{"lo", sweep.lo}, {"hi", sweep.hi}, {"n", sweep.n}};
    } else {
        InformativeClock clock = parse_clock_spec(opts.clock_spec, cfg.market.t0());
        InfoValuation val = net_value(cfg.market, cfg.utility, cfg.cost, clock);
        table.header = {"value", "cost", "net", "bound"};
        table.columns = {{val.value}, {val.cost}, {val.net}, {val.bound}};
        sidecar["clock"] = opts.clock_spec;
    }
    emit_csv_or_stdout(opts.out_path, table);
    if (!opts.out_path.empty()) write_json_file(sidecar_path(opts.out_path), sidecar);
    return 0;
}

int cmd_optimize(const CommonOpts& opts) {
    RunConfig cfg = config_for(opts);
    require_well_posed(cfg.market, cfg.utility);
    double lambda = std::get<QuadraticCost>(cfg.cost).lambda;
    AcquisitionSolution sol = solve(cfg.market, cfg.utility, lambda);

    CsvTable table;
    table.header = {"t", "tau", "tau_prime"};
    table.columns = {sol.clock.grid_times(), sol.clock.grid_tau(),
                     sol.clock.grid_tau_prime()};
    emit_csv_or_stdout(opts.out_path, table);

    nlohmann::json diag = config_to_json(cfg);
    diag["shoot_param"] = sol.shoot_param;
    if (sol.y_star) {
        diag["y_star"] = *sol.y_star;
    } else {
        diag["y_star"] = nullptr;
    }
    diag["value"] = sol.value;
    diag["cost"] = sol.cost;
    diag["net"] = sol.net;
    diag["residuals"] = {{"ode_residual_max", sol.diagnostics.ode_residual_max},
                         {"ode_residual_scaled", sol.diagnostics.ode_residual_scaled},
                         {"transversality_gap", sol.diagnostics.transversality_gap},
                         {"el_gateaux_check", sol.diagnostics.el_gateaux_check}};
    if (!opts.out_path.empty()) {
        write_json_file(sidecar_path(opts.out_path), diag);
    } else {
        std::cout << diag.dump(2) << "\n";
    }
    return 0;
}

int cmd_simulate(const CommonOpts& opts, std::int64_t n_paths, int n_steps,
                 const std::string& strategy_text, bool check_closed_form,
                 bool estimate_rho, int window, int workers) {
    RunConfig cfg = config_for(opts);
    InformativeClock clock = parse_clock_spec(opts.clock_spec, cfg.market.t0());
    SimConfig sim;
    sim.n_paths = n_paths;
    sim.n_steps = n_steps;
    sim.master_seed = opts.seed;
    sim.strategy = parse_strategy(strategy_text);
    sim.n_workers = workers;

    if (estimate_rho) {
        PathRecord rec =
            simulate_path_record(cfg.market, clock, sim.n_steps, effective_seed(sim));
        CorrelationProfile prof = estimate_correlation(rec.t, rec.Y, rec.m, window);
        CsvTable table;
        table.header = {"t", "rho_hat"};
        table.columns.resize(2);
        for (double t : rec.t) {
            table.columns[0].push_back(t);
            table.columns[1].push_back(prof.rho(t));
        }
        emit_csv_or_stdout(opts.out_path, table);
        return 0;
    }

    SimReport rep = simulate(cfg.market, cfg.utility, clock, sim);
    nlohmann::json j = report_to_json(rep);
    if (check_closed_form) {
        ValueCoefficients coeffs = coefficients(cfg.market, cfg.utility, clock);
        double v = value(coeffs, StrategyQuery{0.0, cfg.market.x0, cfg.market.mu0});
        double diff = std::abs(rep.mean_utility - v);
        double ratio = rep.std_error > 0.0 ? diff / rep.std_error : 0.0;
        j["check_closed_form"] = {{"closed_form_value", v},
                                  {"abs_diff", diff},
                                  {"diff_over_se", ratio},
                                  {"pass", ratio <= 3.0}};
        std::cerr << (ratio <= 3.0 ? "PASS" : "FAIL") << ": |MC - V| = " << diff << " = "
                  << ratio << " SE\n";
    }
    if (!opts.out_path.empty()) {
        write_json_file(opts.out_path, j);
    } else {
        std::cout << j.dump(2) << "\n";
    }
    return 0;
}

int cmd_filter_demo(const CommonOpts& opts, int n_steps) {
    RunConfig cfg = config_for(opts);
    InformativeClock clock = parse_clock_spec(opts.clock_spec, cfg.market.t0());
    SimConfig seed_cfg;
    seed_cfg.master_seed = opts.seed;
    PathRecord rec = simulate_path_record(cfg.market, clock, n_steps, effective_seed(seed_cfg));

    CsvTable table;
    table.header = {"t", "Y", "m", "Z", "true_mu", "var"};
    table.columns.resize(6);
    double sig2 = cfg.market.sigma * cfg.market.sigma;
    for (std::size_t i = 0; i < rec.t.size(); ++i) {
        table.columns[0].push_back(rec.t[i]);
        table.columns[1].push_back(rec.Y[i]);
        table.columns[2].push_back(rec.m[i]);
        table.columns[3].push_back(rec.Z[i]);
        table.columns[4].push_back(rec.mu);
        table.columns[5].push_back(sig2 / rec.tau[i]);
    }
    emit_csv_or_stdout(opts.out_path, table);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"optimal investment under drift uncertainty with purchasable information"};
    app.require_subcommand(1);

    CommonOpts value_opts, opt_opts, sim_opts, demo_opts;
    std::string sweep_text;
    bool defaults = false;
    CLI::App* value_cmd = app.add_subcommand("value", "value/cost/net of a clock or k-sweep");
    add_common(value_cmd, value_opts);
    value_cmd->add_option("--sweep", sweep_text, "linear-clock sweep k=<lo>:<hi>:<n>");
    value_cmd->add_flag("--defaults", defaults, "paper-figure defaults and sweep k=1:10:10");

    CLI::App* opt_cmd = app.add_subcommand("optimize", "solve the optimal acquisition schedule");
    add_common(opt_cmd, opt_opts);

    std::int64_t n_paths = 10000;
    int n_steps = 250;
    int workers = 0;
    int window = 256;
    bool check_cf = false;
    bool est_rho = false;
    std::string strategy_text = "optimal";
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo verification runs");
    add_common(sim_cmd, sim_opts);
    sim_cmd->add_option("--paths", n_paths, "number of simulated paths");
    sim_cmd->add_option("--steps", n_steps, "time steps over [0, T]");
    sim_cmd->add_option("--workers", workers, "worker threads (0 = hardware)");
    sim_cmd->add_option("--strategy", strategy_text,
                        "zero | optimal | fraction:k=<v> | scaled:f=<v>");
    sim_cmd->add_flag("--check-closed-form", check_cf, "compare MC mean against V(0,x0,mu0)");
    sim_cmd->add_flag("--estimate-rho", est_rho, "emit rolling correlation of one path");
    sim_cmd->add_option("--window", window, "rolling window for --estimate-rho");

    int demo_steps = 1000;
    CLI::App* demo_cmd = app.add_subcommand("filter-demo", "one filtered path as CSV");
    add_common(demo_cmd, demo_opts);
    demo_cmd->add_option("--steps", demo_steps, "time steps over [0, T]");

    try {
        app.parse(argc, argv);
        if (value_cmd->parsed()) return cmd_value(value_opts, sweep_text, defaults);
        if (opt_cmd->parsed()) return cmd_optimize(opt_opts);
        if (sim_cmd->parsed()) {
            return cmd_simulate(sim_opts, n_paths, n_steps, strategy_text, check_cf, est_rho,
                                window, workers);
        }
        return cmd_filter_demo(demo_opts, demo_steps);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    } catch (const IllPosedProblem& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidParams& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SolverFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const NoBracket& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
