#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "risidd/types.hpp"

namespace risidd {

using Bits = std::vector<std::uint8_t>;

/// Regular (dv, dc) LDPC code with a girth-6 seeded random parity-check
/// matrix and a systematic encoder derived from its GF(2) row reduction.
struct LdpcCode {
    int n = 0;   // block length
    int k = 0;   // message length
    int m = 0;   // parity checks
    int dv = 0;  // variable degree
    int dc = 0;  // check degree
    std::uint64_t seed = 0;

    std::vector<std::vector<int>> check_vars;  // per check: its dc variables
    std::vector<std::vector<int>> var_checks;  // per variable: its dv checks

    // encoder: parity_cols[r] is the pivot column of reduced row r, whose bit
    // is the XOR of the message bits listed in parity_deps[r] (indices into
    // the message vector / info_cols).
    std::vector<int> info_cols;
    std::vector<int> parity_cols;
    std::vector<std::vector<int>> parity_deps;

    // flat edge layout for message passing: check c owns edge ids
    // [c*dc, (c+1)*dc), edge_var maps edge -> variable, var_edges maps
    // variable -> its dv edge ids.
    std::vector<int> edge_var;
    std::vector<std::vector<int>> var_edges;

    double rate() const { return static_cast<double>(k) / n; }
    int num_edges() const { return n * dv; }
};

/// Build a code by progressive growth: each variable connects to dv distinct
/// minimum-degree checks whose variable sets are disjoint from the variable's
/// two-step neighbourhood (no length-4 cycles). Random tie-breaks come from
/// seed; jammed or rank-deficient attempts are re-seeded and retried a
/// bounded number of times before NumericalError. Requires the degree
/// balance n*dv == m*dc with m = n*(1 - rate).
LdpcCode construct_code(int n, double rate, int dv, int dc, std::uint64_t seed);

/// Systematic encode: message bits land on info_cols, parity bits are XOR
/// combinations per the reduced parity checks. H c = 0 by construction.
Bits encode(const LdpcCode& code, const Bits& msg);

/// Message bits back out of a codeword (the systematic positions).
Bits extract_message(const LdpcCode& code, const Bits& codeword);

/// True when every parity check is satisfied.
bool syndrome_ok(const LdpcCode& code, const Bits& bits);

struct DecodeResult {
    std::vector<double> posterior;  // input + all check messages, unclamped
    std::vector<double> extrinsic;  // posterior - input, clamped to +-kLlrMax
    Bits hard_bits;                 // sign decisions on the posterior
    bool converged = false;         // zero syndrome with no erased posterior
    int iterations = 0;
};

/// Flooding sum-product decoder. Check updates use leave-one-out prefix and
/// suffix products of tanh(v2c/2) (no divisions), with the product clamped
/// away from +-1 before the inverse transform. Stops early only when the
/// hard decision satisfies all checks and every posterior is nonzero.
DecodeResult bp_decode(const LdpcCode& code, const std::vector<double>& llr_in,
                       int max_iters);

/// Gray QPSK mapping, two bits per symbol in order (real axis, imag axis);
/// bit b maps to level 1 - 2b scaled by sqrt(es/2). bits.size() must be even.
std::vector<cd> map_bits_to_symbols(const Bits& bits, double es);

/// Coordinate-wise sign demapping, inverse of map_bits_to_symbols.
Bits hard_demap(const std::vector<cd>& symbols);

/// Plain-text sparse export of the parity-check matrix (alist layout:
/// dimensions, degrees, then 1-based adjacency lists).
void save_alist(const LdpcCode& code, const std::string& path);

/// Load an alist file written by save_alist and rebuild the systematic
/// encoder from the stored adjacency.
LdpcCode load_alist(const std::string& path);

/// Canonical cache filename for a code's construction parameters.
std::string code_cache_name(int n, double rate, int dv, int dc,
                            std::uint64_t seed);

}  // namespace risidd
