#include "risidd/sim/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <mutex>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

namespace risidd {

const char* kResultHeader =
    "scheme,ptx_dbm,idd_iteration,ber,sum_rate,frames,bit_errors,seed";

namespace {

std::string fmt(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

// frozen-geometry stream tag, far outside any sweep index
constexpr std::uint64_t kGeomTag = 0x67656f6dULL;

struct FrameOutcome {
    std::vector<long> errors;     // one entry per reported iteration
    std::vector<double> sumrate;  // same layout
    std::vector<double> trace;    // surface optimizer objective history
};

FrameOutcome simulate_frame(const SimConfig& cfg, const LdpcCode* code,
                            Scheme scheme, int power_idx, int frame_idx,
                            const std::vector<Vec2>* fixed_users,
                            const Geometry& base_geom) {
    const bool coded = scheme_is_coded(scheme);
    FrameStreams streams =
        frame_streams(cfg.master_seed, static_cast<std::uint64_t>(power_idx),
                      static_cast<std::uint64_t>(frame_idx));

    FrameSetup setup;
    setup.M = cfg.M;
    setup.N = cfg.N;
    setup.K = cfg.K;
    setup.sigma_n2 = dbm_to_watt(cfg.noise_dbm);
    setup.E_x = effective_symbol_energy(cfg.ptx_dbm_sweep[power_idx],
                                        coded ? cfg.code_rate : 1.0);
    setup.alt_max_rounds = cfg.alt_max_rounds;
    setup.alt_tol = cfg.alt_tol;

    FrameContext ctx =
        build_frame(scheme, setup, base_geom, fixed_users, cfg.user_center(),
                    cfg.radius, code, cfg.code_n, streams);

    FrameOutcome out;
    if (coded) {
        FrameResult fr = run_idd_frame(ctx, *code, cfg.idd_iterations,
                                       cfg.bp_iters);
        for (const auto& st : fr.iterations) {
            out.errors.push_back(st.bit_errors);
            out.sumrate.push_back(st.sum_rate);
        }
    } else {
        UncodedResult ur = uncoded_detect(ctx);
        out.errors.push_back(ur.bit_errors);
        out.sumrate.push_back(ur.sum_rate);
    }
    if (cfg.diagnostics && scheme_uses_ris(scheme))
        out.trace = ctx.ris_trace.mse_history;
    return out;
}

std::optional<LdpcCode> prepare_code(const SimConfig& cfg) {
    bool any_coded = false;
    for (Scheme s : cfg.schemes) any_coded |= scheme_is_coded(s);
    if (!any_coded) return std::nullopt;

    if (!cfg.code_cache_dir.empty()) {
        namespace fs = std::filesystem;
        fs::path p = fs::path(cfg.code_cache_dir) /
                     code_cache_name(cfg.code_n, cfg.code_rate, cfg.code_dv,
                                     cfg.code_dc, cfg.code_seed);
        if (fs::exists(p)) return load_alist(p.string());
        LdpcCode code = construct_code(cfg.code_n, cfg.code_rate, cfg.code_dv,
                                       cfg.code_dc, cfg.code_seed);
        fs::create_directories(p.parent_path());
        save_alist(code, p.string());
        return code;
    }
    return construct_code(cfg.code_n, cfg.code_rate, cfg.code_dv, cfg.code_dc,
                          cfg.code_seed);
}

}  // namespace

std::string format_result_row(const ResultRow& r) {
    std::string s = r.scheme;
    s += ',';
    s += fmt(r.ptx_dbm);
    s += ',';
    s += std::to_string(r.idd_iteration);
    s += ',';
    s += fmt(r.ber);
    s += ',';
    s += fmt(r.sum_rate);
    s += ',';
    s += std::to_string(r.frames);
    s += ',';
    s += std::to_string(r.bit_errors);
    s += ',';
    s += std::to_string(r.seed);
    return s;
}

SweepResult run_sweep(const SimConfig& cfg) {
    std::optional<LdpcCode> code = prepare_code(cfg);

    std::ofstream csv(cfg.output_path);
    if (!csv)
        throw std::runtime_error("run_sweep: cannot write " + cfg.output_path);
    csv << kResultHeader << '\n';
    csv.flush();

    save_config(cfg, cfg.output_path + ".config.json");

    std::ofstream trace;
    if (cfg.diagnostics) {
        trace.open(cfg.output_path + ".trace.csv");
        if (!trace)
            throw std::runtime_error("run_sweep: cannot write " +
                                     cfg.output_path + ".trace.csv");
        trace << "scheme,ptx_dbm,frame,round,relaxed_mse\n";
    }

    std::optional<std::vector<Vec2>> frozen;
    if (cfg.freeze_positions) {
        Rng g(derive_stream(cfg.master_seed, kGeomTag));
        frozen = sample_user_positions(g, cfg.K, cfg.user_center(), cfg.radius);
    }
    const Geometry base_geom = cfg.base_geometry();
    const int F = cfg.frames_per_point;

    SweepResult result;
    for (Scheme scheme : cfg.schemes) {
        const bool coded = scheme_is_coded(scheme);
        for (int pi = 0; pi < static_cast<int>(cfg.ptx_dbm_sweep.size()); ++pi) {
            std::vector<FrameOutcome> frames(F);
            try {
                int nw = cfg.workers > 0
                             ? cfg.workers
                             : static_cast<int>(
                                   std::thread::hardware_concurrency());
                nw = std::clamp(nw, 1, F);
                if (nw == 1) {
                    for (int fi = 0; fi < F; ++fi)
                        frames[fi] = simulate_frame(
                            cfg, code ? &*code : nullptr, scheme, pi, fi,
                            frozen ? &*frozen : nullptr, base_geom);
                } else {
                    std::atomic<int> next{0};
                    std::atomic<bool> failed{false};
                    std::exception_ptr eptr;
                    std::mutex emu;
                    std::vector<std::thread> pool;
                    for (int w = 0; w < nw; ++w)
                        pool.emplace_back([&] {
                            while (!failed.load(std::memory_order_relaxed)) {
                                int fi = next.fetch_add(1);
                                if (fi >= F) break;
                                try {
                                    frames[fi] = simulate_frame(
                                        cfg, code ? &*code : nullptr, scheme,
                                        pi, fi, frozen ? &*frozen : nullptr,
                                        base_geom);
                                } catch (...) {
                                    std::scoped_lock lk(emu);
                                    if (!eptr) eptr = std::current_exception();
                                    failed.store(true);
                                }
                            }
                        });
                    for (auto& t : pool) t.join();
                    if (eptr) std::rethrow_exception(eptr);
                }
            } catch (const std::exception& e) {
                std::cerr << "point aborted: scheme=" << scheme_name(scheme)
                          << " ptx_dbm=" << cfg.ptx_dbm_sweep[pi] << ": "
                          << e.what() << '\n';
                ++result.failed_points;
                continue;
            }

            // ordered reduction: frame index order fixes the fp summation
            const int iters = coded ? cfg.idd_iterations : 1;
            const long bits_per_frame =
                static_cast<long>(cfg.K) * (coded ? code->k : cfg.code_n);
            for (int it = 0; it < iters; ++it) {
                long errs = 0;
                double sr = 0.0;
                for (int fi = 0; fi < F; ++fi) {
                    errs += frames[fi].errors[it];
                    sr += frames[fi].sumrate[it];
                }
                ResultRow row;
                row.scheme = scheme_name(scheme);
                row.ptx_dbm = cfg.ptx_dbm_sweep[pi];
                row.idd_iteration = it + 1;
                row.bit_errors = errs;
                row.frames = F;
                row.ber = static_cast<double>(errs) /
                          (static_cast<double>(F) * bits_per_frame);
                row.sum_rate = sr / F;
                row.seed = cfg.master_seed;
                csv << format_result_row(row) << '\n';
                result.rows.push_back(std::move(row));
            }
            csv.flush();

            if (cfg.diagnostics && scheme_uses_ris(scheme)) {
                for (int fi = 0; fi < F; ++fi)
                    for (std::size_t r = 0; r < frames[fi].trace.size(); ++r)
                        trace << scheme_name(scheme) << ','
                              << fmt(cfg.ptx_dbm_sweep[pi]) << ',' << fi << ','
                              << r << ',' << fmt(frames[fi].trace[r]) << '\n';
                trace.flush();
            }
        }
    }
    if (!csv) throw std::runtime_error("run_sweep: write failed for " + cfg.output_path);
    return result;
}

}  // namespace risidd
