#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "infoclock/clock.hpp"
#include "infoclock/errors.hpp"
#include "infoclock/market.hpp"
#include "infoclock/montecarlo.hpp"

// Config ingestion and flat-file emission. The JSON schema is strict: every
// object carries exactly its documented keys and unknown keys abort the run
// naming the offender. CSV output uses 17 significant digits, '.' decimal
// separator and '\n' line endings so files are byte-stable across runs.

namespace infoclock {

struct RunConfig {
    MarketParams market;
    UtilitySpec utility;
    CostSpec cost;
};

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, const std::string& where,
                           const std::vector<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const std::string& k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError("config: unknown key \"" + it.key() + "\" in " + where);
        }
    }
}

inline double number_at(const nlohmann::json& obj, const std::string& where,
                        const std::string& key) {
    if (!obj.contains(key)) {
        throw ConfigError("config: missing key \"" + key + "\" in " + where);
    }
    if (!obj.at(key).is_number()) {
        throw ConfigError("config: key \"" + key + "\" in " + where + " must be a number");
    }
    return obj.at(key).get<double>();
}

} // namespace detail

inline RunConfig parse_config_json(const nlohmann::json& root) {
    if (!root.is_object()) throw ConfigError("config: top level must be an object");
    detail::reject_unknown(root, "top level", {"market", "utility", "cost"});
    for (const char* key : {"market", "utility", "cost"}) {
        if (!root.contains(key) || !root.at(key).is_object()) {
            throw ConfigError(std::string("config: missing object \"") + key + "\"");
        }
    }

    RunConfig cfg;
    const nlohmann::json& mkt = root.at("market");
    detail::reject_unknown(mkt, "market", {"r", "sigma", "mu0", "sigma0_sq", "T", "x0"});
    cfg.market.r = detail::number_at(mkt, "market", "r");
    cfg.market.sigma = detail::number_at(mkt, "market", "sigma");
    cfg.market.mu0 = detail::number_at(mkt, "market", "mu0");
    cfg.market.sigma0_sq = detail::number_at(mkt, "market", "sigma0_sq");
    cfg.market.T = detail::number_at(mkt, "market", "T");
    cfg.market.x0 = detail::number_at(mkt, "market", "x0");

    const nlohmann::json& uty = root.at("utility");
    detail::reject_unknown(uty, "utility", {"kind", "beta", "gamma"});
    if (!uty.contains("kind") || !uty.at("kind").is_string()) {
        throw ConfigError("config: utility.kind must be a string");
    }
    std::string kind = uty.at("kind").get<std::string>();
    if (kind == "cara") {
        if (uty.contains("gamma")) throw ConfigError("config: CARA takes beta, not gamma");
        cfg.utility = Cara{detail::number_at(uty, "utility", "beta")};
    } else if (kind == "crra") {
        if (uty.contains("beta")) throw ConfigError("config: CRRA takes gamma, not beta");
        cfg.utility = Crra{detail::number_at(uty, "utility", "gamma")};
    } else if (kind == "log") {
        if (uty.contains("beta") || uty.contains("gamma")) {
            throw ConfigError("config: log utility takes no parameter");
        }
        cfg.utility = LogUtility{};
    } else {
        throw ConfigError("config: utility.kind must be one of cara|crra|log");
    }

    const nlohmann::json& cst = root.at("cost");
    detail::reject_unknown(cst, "cost", {"kind", "lambda"});
    if (!cst.contains("kind") || cst.at("kind").get<std::string>() != "quadratic") {
        throw ConfigError("config: cost.kind must be \"quadratic\"");
    }
    cfg.cost = QuadraticCost{detail::number_at(cst, "cost", "lambda")};

    try {
        validate(cfg.market, cfg.utility);
        validate(cfg.cost);
    } catch (const InvalidParams& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

inline RunConfig parse_config_text(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    return parse_config_json(root);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

// Paper-figure defaults: t0 = 4 (sigma = 0.2, sigma0^2 = 0.01), T = 2,
// CARA beta = 0.001, x0 = 1000, quadratic lambda = 1.
inline RunConfig default_config() {
    RunConfig cfg;
    cfg.market = MarketParams{0.02, 0.2, 0.08, 0.01, 2.0, 1000.0};
    cfg.utility = Cara{0.001};
    cfg.cost = QuadraticCost{1.0};
    return cfg;
}

inline nlohmann::json config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["market"] = {{"r", cfg.market.r},       {"sigma", cfg.market.sigma},
                   {"mu0", cfg.market.mu0},   {"sigma0_sq", cfg.market.sigma0_sq},
                   {"T", cfg.market.T},       {"x0", cfg.market.x0}};
    if (const Cara* u = std::get_if<Cara>(&cfg.utility)) {
        j["utility"] = {{"kind", "cara"}, {"beta", u->beta}};
    } else if (const Crra* u = std::get_if<Crra>(&cfg.utility)) {
        j["utility"] = {{"kind", "crra"}, {"gamma", u->gamma}};
    } else {
        j["utility"] = {{"kind", "log"}};
    }
    j["cost"] = {{"kind", "quadratic"},
                 {"lambda", std::get<QuadraticCost>(cfg.cost).lambda}};
    return j;
}

inline nlohmann::json report_to_json(const SimReport& rep) {
    nlohmann::json j;
    j["mean_utility"] = rep.mean_utility;
    j["std_error"] = rep.std_error;
    j["mean_sq_drift_error"] = rep.mean_sq_drift_error;
    j["n_paths"] = rep.n_paths;
    j["n_steps"] = rep.n_steps;
    j["seed"] = rep.seed;
    j["floored_paths"] = rep.floored_paths;
    j["terminal_wealth"] = {{"mean", rep.terminal_wealth.mean},
                            {"variance", rep.terminal_wealth.variance},
                            {"min", rep.terminal_wealth.min}};
    return j;
}

// "natural" | "linear:k=<float>" | "grid:<path.csv>" (CSV columns t,tau_prime).
inline InformativeClock parse_clock_spec(const std::string& spec, double t0);

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
};

inline void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary); // binary keeps '\n' endings everywhere
    if (!out) throw ConfigError("cannot open output file " + path);
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        out << (i ? "," : "") << table.header[i];
    }
    out << "\n";
    std::size_t rows = table.columns.empty() ? 0 : table.columns[0].size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            out << (c ? "," : "") << format_number(table.columns[c][r]);
        }
        out << "\n";
    }
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open CSV file " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("CSV file " + path + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) table.header.push_back(cell);
    if (table.header.empty()) throw ConfigError("CSV file " + path + " has no header");
    table.columns.resize(table.header.size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::size_t c = 0;
        while (std::getline(ls, cell, ',')) {
            if (c >= table.columns.size()) {
                throw ConfigError("CSV " + path + ": too many cells on line " +
                                  std::to_string(line_no));
            }
            try {
                table.columns[c].push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("CSV " + path + ": non-numeric cell on line " +
                                  std::to_string(line_no));
            }
            ++c;
        }
        if (c != table.columns.size()) {
            throw ConfigError("CSV " + path + ": wrong cell count on line " +
                              std::to_string(line_no));
        }
    }
    return table;
}

inline InformativeClock parse_clock_spec(const std::string& spec, double t0) {
    if (spec == "natural") return InformativeClock::natural(t0);
    if (spec == "insider") return InformativeClock::insider(t0);
    if (spec.rfind("linear:k=", 0) == 0) {
        std::string num = spec.substr(9);
        try {
            std::size_t used = 0;
            double k = std::stod(num, &used);
            if (used != num.size()) throw std::invalid_argument("trailing characters");
            return InformativeClock::linear(t0, k);
        } catch (const InvalidParams&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("clock spec: cannot parse slope in \"" + spec + "\"");
        }
    }
    if (spec.rfind("grid:", 0) == 0) {
        CsvTable table = read_csv(spec.substr(5));
        if (table.header.size() != 2 || table.header[0] != "t" ||
            table.header[1] != "tau_prime") {
            throw ConfigError("clock grid CSV must have header t,tau_prime");
        }
        return InformativeClock::from_grid(t0, table.columns[0], table.columns[1]);
    }
    throw ConfigError("clock spec must be natural | linear:k=<float> | grid:<path.csv>");
}

// Path CSV for correlation estimation: columns t,Y,m on a uniform grid.
struct PathColumns {
    std::vector<double> t, Y, m;
};

inline PathColumns read_path_csv(const std::string& path) {
    CsvTable table = read_csv(path);
    if (table.header.size() != 3 || table.header[0] != "t" || table.header[1] != "Y" ||
        table.header[2] != "m") {
        throw ConfigError("path CSV must have header t,Y,m");
    }
    PathColumns cols{table.columns[0], table.columns[1], table.columns[2]};
    if (cols.t.size() < 3) throw ConfigError("path CSV needs at least 3 rows");
    double h = cols.t[1] - cols.t[0];
    for (std::size_t i = 1; i + 1 < cols.t.size(); ++i) {
        if (std::abs((cols.t[i + 1] - cols.t[i]) - h) > 1e-9 * std::max(1.0, h)) {
            throw ConfigError("path CSV must sit on a uniform time grid");
        }
    }
    return cols;
}

} // namespace infoclock
