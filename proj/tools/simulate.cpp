// Link-level Monte Carlo sweep driver: loads a JSON config, runs the
// requested scheme/power grid and writes CSV results plus a resolved-config
// sidecar.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "risidd/sim/runner.hpp"
#include "risidd/simd/kernels.hpp"

int main(int argc, char** argv) {
    CLI::App app{"RIS-assisted multiuser uplink simulator"};

    std::string config_path;
    std::string schemes_arg;
    std::string out_path;
    std::uint64_t seed = 0;
    int frames = -1;
    int workers = -1;
    bool diagnostics = false;

    app.add_option("--config", config_path, "JSON configuration file")
        ->required();
    app.add_option("--seed", seed, "Override master_seed");
    app.add_option("--frames", frames, "Override frames_per_point");
    app.add_option("--schemes", schemes_arg,
                   "Comma-separated subset of mmse,ris,idd,ris_idd");
    app.add_option("--out", out_path, "Override output CSV path");
    app.add_option("--workers", workers, "Worker threads (0 = hardware)");
    app.add_flag("--diagnostics", diagnostics,
                 "Also write per-frame optimizer traces");

    CLI11_PARSE(app, argc, argv);

    try {
        risidd::SimConfig cfg = risidd::load_config(config_path);
        if (app.count("--seed")) cfg.master_seed = seed;
        if (frames >= 0) cfg.frames_per_point = frames;
        if (!out_path.empty()) cfg.output_path = out_path;
        if (workers >= 0) cfg.workers = workers;
        if (diagnostics) cfg.diagnostics = true;
        if (!schemes_arg.empty()) {
            cfg.schemes.clear();
            std::stringstream ss(schemes_arg);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                auto s = risidd::parse_scheme(tok);
                if (!s) {
                    std::cerr << "unknown scheme \"" << tok << "\"\n";
                    return 2;
                }
                cfg.schemes.push_back(*s);
            }
            if (cfg.schemes.empty()) {
                std::cerr << "empty --schemes list\n";
                return 2;
            }
        }
        if (frames >= 0 && cfg.frames_per_point < 1) {
            std::cerr << "config: frames_per_point must be >= 1\n";
            return 2;
        }

        std::cerr << "kernels: "
                  << risidd::simd::backend_name(risidd::simd::active_backend())
                  << "\n";
        risidd::SweepResult res = risidd::run_sweep(cfg);
        std::cerr << res.rows.size() << " rows -> " << cfg.output_path << "\n";
        if (res.failed_points > 0) {
            std::cerr << res.failed_points << " point(s) aborted\n";
            return 1;
        }
        return 0;
    } catch (const risidd::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
