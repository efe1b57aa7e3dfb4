#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "risidd/idd.hpp"
#include "risidd/types.hpp"

namespace risidd {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fully resolved simulation configuration. Required input fields: M, N, K,
/// noise_dbm, master_seed. Everything else has the documented default.
struct SimConfig {
    // dimensions (required)
    int M = 0;
    int N = 0;
    int K = 0;

    // geometry (defaults: AP at (0,-60), RIS at (300,10), terminals uniform
    // in a 5 m disk around (L, 0) with L = 300, resampled every frame)
    double ap_x = 0.0, ap_y = -60.0;
    double ris_x = 300.0, ris_y = 10.0;
    double L = 300.0;
    double radius = 5.0;
    bool freeze_positions = false;

    // operating point
    std::vector<double> ptx_dbm_sweep = {-2, 0, 2, 4, 6, 8, 10, 12};
    double noise_dbm = 0.0;  // required

    // code (defaults: regular (3,6), n = 512, rate 1/2, 20 decoder passes)
    int code_n = 512;
    double code_rate = 0.5;
    int code_dv = 3;
    int code_dc = 6;
    int bp_iters = 20;
    std::uint64_t code_seed = 1;
    std::string code_cache_dir;  // empty: rebuild instead of caching

    int idd_iterations = 3;
    std::vector<Scheme> schemes = {Scheme::mmse, Scheme::ris, Scheme::idd,
                                   Scheme::ris_idd};
    int frames_per_point = 500;
    std::uint64_t master_seed = 0;  // required
    std::string output_path = "results.csv";
    int workers = 0;  // 0: hardware concurrency
    bool diagnostics = false;

    // surface optimizer stopping rule
    int alt_max_rounds = 20;
    double alt_tol = 1e-4;

    bool operator==(const SimConfig&) const = default;

    Geometry base_geometry() const {
        Geometry g;
        g.ap = Vec2(ap_x, ap_y);
        g.ris = Vec2(ris_x, ris_y);
        return g;
    }
    Vec2 user_center() const { return Vec2(L, 0.0); }
};

double dbm_to_watt(double dbm);

/// Per-symbol energy at the given transmit power, normalized by the code
/// rate: E_x = 10^((ptx_dbm - 30)/10) * rate.
double effective_symbol_energy(double ptx_dbm, double rate);

/// Parse a JSON config. Unknown keys warn on stderr; missing required
/// fields, unparsable values and invariant violations throw ConfigError.
SimConfig parse_config(const std::string& text, const std::string& origin);

SimConfig load_config(const std::string& path);

/// Resolved config as JSON text (the sidecar payload); load-compatible.
std::string config_to_json(const SimConfig& cfg);

void save_config(const SimConfig& cfg, const std::string& path);

}  // namespace risidd
