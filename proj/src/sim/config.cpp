#include "risidd/sim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace risidd {

using nlohmann::json;

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double effective_symbol_energy(double ptx_dbm, double rate) {
    require(rate > 0.0 && rate <= 1.0, "effective_symbol_energy: bad rate");
    return dbm_to_watt(ptx_dbm) * rate;
}

namespace {

void warn_unknown(const json& j, const std::vector<std::string>& known,
                  const std::string& scope) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            std::cerr << "config warning: unknown key \"" << scope << it.key()
                      << "\" ignored\n";
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: bad value for \"") + key +
                          "\": " + e.what());
    }
}

void validate(const SimConfig& c) {
    auto bad = [](const std::string& m) { throw ConfigError("config: " + m); };
    if (c.M < 1) bad("M must be >= 1");
    if (c.K < 1) bad("K must be >= 1");
    if (c.N < 0) bad("N must be >= 0");
    if (c.ptx_dbm_sweep.empty()) bad("ptx_dbm_sweep must be non-empty");
    for (double p : c.ptx_dbm_sweep)
        if (!std::isfinite(p)) bad("ptx_dbm_sweep entries must be finite");
    if (!std::isfinite(c.noise_dbm) || !(dbm_to_watt(c.noise_dbm) > 0.0))
        bad("noise_dbm must convert to positive linear watts");
    if (c.frames_per_point < 1) bad("frames_per_point must be >= 1");
    if (c.idd_iterations < 1) bad("idd_iterations must be >= 1");
    if (c.bp_iters < 1) bad("bp_iters must be >= 1");
    if (c.code_n < 4 || c.code_n % 2) bad("code n must be even and >= 4");
    if (!(c.code_rate > 0.0 && c.code_rate < 1.0)) bad("code rate must be in (0, 1)");
    if (c.schemes.empty()) bad("schemes must be non-empty");
    if (c.radius < 0.0) bad("radius must be >= 0");
    if (c.workers < 0) bad("workers must be >= 0");
    if (c.alt_max_rounds < 1) bad("alt_opt max_rounds must be >= 1");
    if (!(c.alt_tol > 0.0)) bad("alt_opt tol must be positive");
    if (c.output_path.empty()) bad("output_path must be non-empty");
}

}  // namespace

SimConfig parse_config(const std::string& text, const std::string& origin) {
    bool blank = text.find_first_not_of(" \t\r\n") == std::string::npos;
    json j;
    if (!blank) {
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError("config: cannot parse " + origin + ": " + e.what());
        }
        if (!j.is_object()) throw ConfigError("config: top level must be an object");
    } else {
        j = json::object();
    }

    std::vector<std::string> missing;
    for (const char* req : {"M", "N", "K", "noise_dbm", "master_seed"})
        if (!j.contains(req)) missing.emplace_back(req);
    if (!missing.empty()) {
        std::string m = "config: missing required fields in " + origin + ":";
        for (const auto& f : missing) m += " " + f;
        throw ConfigError(m);
    }

    warn_unknown(j,
                 {"M", "N", "K", "geometry", "ptx_dbm_sweep", "noise_dbm",
                  "code", "idd_iterations", "schemes", "frames_per_point",
                  "master_seed", "output_path", "workers", "diagnostics",
                  "alt_opt"},
                 "");

    SimConfig c;
    read(j, "M", c.M);
    read(j, "N", c.N);
    read(j, "K", c.K);
    read(j, "noise_dbm", c.noise_dbm);
    read(j, "master_seed", c.master_seed);
    read(j, "ptx_dbm_sweep", c.ptx_dbm_sweep);
    read(j, "idd_iterations", c.idd_iterations);
    read(j, "frames_per_point", c.frames_per_point);
    read(j, "output_path", c.output_path);
    read(j, "workers", c.workers);
    read(j, "diagnostics", c.diagnostics);

    if (j.contains("geometry")) {
        const json& g = j.at("geometry");
        if (!g.is_object()) throw ConfigError("config: geometry must be an object");
        warn_unknown(g, {"ap", "ris", "L", "radius", "freeze_positions"},
                     "geometry.");
        auto point = [&](const char* key, double& x, double& y) {
            if (!g.contains(key)) return;
            std::vector<double> v;
            read(g, key, v);
            if (v.size() != 2)
                throw ConfigError(std::string("config: geometry.") + key +
                                  " must be [x, y]");
            x = v[0];
            y = v[1];
        };
        point("ap", c.ap_x, c.ap_y);
        point("ris", c.ris_x, c.ris_y);
        read(g, "L", c.L);
        read(g, "radius", c.radius);
        read(g, "freeze_positions", c.freeze_positions);
    }

    if (j.contains("code")) {
        const json& cc = j.at("code");
        if (!cc.is_object()) throw ConfigError("config: code must be an object");
        warn_unknown(cc, {"n", "rate", "dv", "dc", "bp_iters", "seed", "cache_dir"},
                     "code.");
        read(cc, "n", c.code_n);
        read(cc, "rate", c.code_rate);
        read(cc, "dv", c.code_dv);
        read(cc, "dc", c.code_dc);
        read(cc, "bp_iters", c.bp_iters);
        read(cc, "seed", c.code_seed);
        read(cc, "cache_dir", c.code_cache_dir);
    }

    if (j.contains("alt_opt")) {
        const json& a = j.at("alt_opt");
        if (!a.is_object()) throw ConfigError("config: alt_opt must be an object");
        warn_unknown(a, {"max_rounds", "tol"}, "alt_opt.");
        read(a, "max_rounds", c.alt_max_rounds);
        read(a, "tol", c.alt_tol);
    }

    if (j.contains("schemes")) {
        std::vector<std::string> names;
        read(j, "schemes", names);
        c.schemes.clear();
        for (const auto& nstr : names) {
            auto s = parse_scheme(nstr);
            if (!s) throw ConfigError("config: unknown scheme \"" + nstr + "\"");
            c.schemes.push_back(*s);
        }
    }

    validate(c);
    return c;
}

SimConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path);
}

std::string config_to_json(const SimConfig& c) {
    json j;
    j["M"] = c.M;
    j["N"] = c.N;
    j["K"] = c.K;
    j["geometry"] = {{"ap", {c.ap_x, c.ap_y}},
                     {"ris", {c.ris_x, c.ris_y}},
                     {"L", c.L},
                     {"radius", c.radius},
                     {"freeze_positions", c.freeze_positions}};
    j["ptx_dbm_sweep"] = c.ptx_dbm_sweep;
    j["noise_dbm"] = c.noise_dbm;
    j["code"] = {{"n", c.code_n},         {"rate", c.code_rate},
                 {"dv", c.code_dv},       {"dc", c.code_dc},
                 {"bp_iters", c.bp_iters}, {"seed", c.code_seed},
                 {"cache_dir", c.code_cache_dir}};
    j["idd_iterations"] = c.idd_iterations;
    json names = json::array();
    for (Scheme s : c.schemes) names.push_back(scheme_name(s));
    j["schemes"] = names;
    j["frames_per_point"] = c.frames_per_point;
    j["master_seed"] = c.master_seed;
    j["output_path"] = c.output_path;
    j["workers"] = c.workers;
    j["diagnostics"] = c.diagnostics;
    j["alt_opt"] = {{"max_rounds", c.alt_max_rounds}, {"tol", c.alt_tol}};
    return j.dump(2) + "\n";
}

void save_config(const SimConfig& cfg, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("config: cannot write " + path);
    f << config_to_json(cfg);
    if (!f) throw std::runtime_error("config: write failed for " + path);
}

}  // namespace risidd
