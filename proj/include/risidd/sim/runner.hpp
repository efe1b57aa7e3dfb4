#pragma once

#include <string>
#include <vector>

#include "risidd/sim/config.hpp"

namespace risidd {

struct ResultRow {
    std::string scheme;
    double ptx_dbm = 0.0;
    int idd_iteration = 0;
    double ber = 0.0;
    double sum_rate = 0.0;
    long frames = 0;
    long bit_errors = 0;
    std::uint64_t seed = 0;
};

struct SweepResult {
    std::vector<ResultRow> rows;
    int failed_points = 0;  // points aborted by a module error
};

/// Monte Carlo sweep over (scheme, transmit power). Each frame draws fresh
/// user positions (unless frozen), fading, payload and noise from streams
/// derived from (master_seed, power index, frame index) but not the scheme,
/// so schemes are compared on paired draws and results are byte-reproducible
/// for any worker count and any scheme subset.
/// Writes output_path (CSV, one row per scheme/power/iteration, flushed per
/// point), a resolved-config JSON sidecar at output_path + ".config.json",
/// and, with diagnostics on, the per-frame surface optimizer traces at
/// output_path + ".trace.csv". A module error aborts the affected point,
/// is reported on stderr and counted; remaining points still run.
SweepResult run_sweep(const SimConfig& cfg);

/// CSV encoding shared by the writer and the tests: shortest round-trip
/// number formatting, fixed column order.
std::string format_result_row(const ResultRow& r);
extern const char* kResultHeader;

}  // namespace risidd
