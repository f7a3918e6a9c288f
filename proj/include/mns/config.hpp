#pragma once

#include "mns/common.hpp"
#include "mns/initial_conditions.hpp"
#include "mns/models.hpp"
#include "mns/multipliers.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>

namespace mns {

/// Full run configuration. Parsing is fail-closed: unknown keys, type
/// mismatches and range violations are all named errors, because a silent
/// typo invalidates a long run.
struct RunConfig {
    ModelKind model = ModelKind::mns;
    int n = 0;
    double T = 0.0;
    std::optional<double> dt;
    std::optional<double> cfl;
    double dt_max = 0.1;
    ICSpec ic;
    RieszSign riesz_sign = RieszSign::positive;
    int sobolev_m = 3;
    double bound_c = 1.0;
    std::string output_dir = "out";
    std::int64_t diag_every = 1;
    std::int64_t snapshot_every = 0;
    double blowup_threshold = 1e6;
    std::string restart_path;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw error("config: value '" + v + "' for key '" + key + "' is not a number");
    }
}

inline std::int64_t parse_int(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw error("config: value '" + v + "' for key '" + key + "' is not an integer");
    }
}

} // namespace detail

/// Parse UTF-8 key=value text ('#' starts a comment) into a validated config.
inline RunConfig parse_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw error("config: line " + std::to_string(lineno) + " is not key=value: '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw error("config: empty key on line " + std::to_string(lineno));
        if (kv.count(key)) throw error("config: duplicate key '" + key + "'");
        kv[key] = val;
    }

    static const std::map<std::string, bool> known = {
        {"model", true},       {"n", true},          {"T", true},
        {"dt", false},         {"cfl", false},       {"dt_max", false},
        {"ic", true},          {"riesz_sign", false}, {"m", false},
        {"C", false},          {"output_dir", false}, {"diag_every", false},
        {"snapshot_every", false}, {"blowup_threshold", false}, {"restart", false},
    };
    for (const auto& [key, val] : kv)
        if (!known.count(key)) throw error("config: unknown key '" + key + "'");
    for (const auto& [key, required] : known)
        if (required && !kv.count(key)) throw error("config: missing required key '" + key + "'");

    RunConfig cfg;
    cfg.model = model_from_name(kv.at("model"));

    {
        const std::int64_t n = detail::parse_int(kv.at("n"), "n");
        if (n < 8 || (n % 2) != 0)
            throw error("config: n must be an even integer >= 8 (got " + kv.at("n") + ")");
        cfg.n = static_cast<int>(n);
    }

    cfg.T = detail::parse_double(kv.at("T"), "T");
    if (!(cfg.T > 0.0)) throw error("config: T must be > 0");

    if (kv.count("dt") && kv.count("cfl"))
        throw error("config: give either dt or cfl, not both");
    if (!kv.count("dt") && !kv.count("cfl"))
        throw error("config: one of dt or cfl is required");
    if (kv.count("dt")) {
        cfg.dt = detail::parse_double(kv.at("dt"), "dt");
        if (!(*cfg.dt > 0.0)) throw error("config: dt must be > 0");
        if (kv.count("dt_max")) throw error("config: dt_max only applies with cfl");
    } else {
        cfg.cfl = detail::parse_double(kv.at("cfl"), "cfl");
        if (!(*cfg.cfl > 0.0 && *cfg.cfl <= 1.0)) throw error("config: cfl must lie in (0, 1]");
        if (kv.count("dt_max")) {
            cfg.dt_max = detail::parse_double(kv.at("dt_max"), "dt_max");
            if (!(cfg.dt_max > 0.0)) throw error("config: dt_max must be > 0");
        }
    }

    cfg.ic = ICSpec::parse(kv.at("ic"));

    if (kv.count("riesz_sign")) {
        const std::string& v = kv.at("riesz_sign");
        if (v == "+1" || v == "1")
            cfg.riesz_sign = RieszSign::positive;
        else if (v == "-1")
            cfg.riesz_sign = RieszSign::negative;
        else
            throw error("config: riesz_sign must be +1 or -1 (got '" + v + "')");
    }

    if (kv.count("m")) {
        const std::int64_t m = detail::parse_int(kv.at("m"), "m");
        if (m < 0) throw error("config: m must be >= 0");
        cfg.sobolev_m = static_cast<int>(m);
    }

    if (kv.count("C")) {
        cfg.bound_c = detail::parse_double(kv.at("C"), "C");
        if (!(cfg.bound_c > 0.0)) throw error("config: C must be > 0");
    }

    if (kv.count("output_dir")) {
        cfg.output_dir = kv.at("output_dir");
        if (cfg.output_dir.empty()) throw error("config: output_dir must not be empty");
    }

    if (kv.count("diag_every")) {
        cfg.diag_every = detail::parse_int(kv.at("diag_every"), "diag_every");
        if (cfg.diag_every < 1) throw error("config: diag_every must be >= 1");
    }

    if (kv.count("snapshot_every")) {
        cfg.snapshot_every = detail::parse_int(kv.at("snapshot_every"), "snapshot_every");
        if (cfg.snapshot_every < 0) throw error("config: snapshot_every must be >= 0");
    }

    if (kv.count("blowup_threshold")) {
        cfg.blowup_threshold = detail::parse_double(kv.at("blowup_threshold"), "blowup_threshold");
        if (!(cfg.blowup_threshold > 0.0)) throw error("config: blowup_threshold must be > 0");
    }

    if (kv.count("restart")) {
        cfg.restart_path = kv.at("restart");
        if (cfg.restart_path.empty()) throw error("config: restart path must not be empty");
    }

    // IC parameters that depend on the grid.
    if (cfg.ic.kind == ICSpec::Kind::random) {
        const int K = cfg.n / 3;
        if (cfg.ic.peak_wavenumber < 1 || cfg.ic.peak_wavenumber > K - 1)
            throw error("config: random ic k0 must lie in [1, " + std::to_string(K - 1) +
                        "] for n = " + std::to_string(cfg.n));
    }

    return cfg;
}

} // namespace mns
