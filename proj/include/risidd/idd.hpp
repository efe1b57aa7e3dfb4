#pragma once

#include <optional>
#include <string>
#include <vector>

#include "risidd/channel.hpp"
#include "risidd/coding.hpp"
#include "risidd/detection.hpp"
#include "risidd/ris_optim.hpp"

namespace risidd {

/// Receiver configurations under test.
///   mmse:    uncoded linear MMSE, no surface
///   ris:     uncoded linear MMSE with optimized surface phases
///   idd:     coded iterative detection and decoding, no surface
///   ris_idd: coded IDD with optimized surface phases
enum class Scheme { mmse, ris, idd, ris_idd };

bool scheme_is_coded(Scheme s);
bool scheme_uses_ris(Scheme s);
std::string scheme_name(Scheme s);
std::optional<Scheme> parse_scheme(const std::string& name);

/// Everything one simulated frame needs: the fading block, the surface
/// profile (empty when the scheme has none), the broadcast data and the
/// received slots. Surface phases are optimized during construction, before
/// any payload is received, and stay frozen across IDD iterations.
struct FrameContext {
    ChannelSet cs;
    PhaseVector phi;
    CMat H_eff;  // channel actually on air: H + G diag(phi) F
    CMat W;      // all-ones-delta filter bank (uncoded / first-pass detection)
    AltOptTrace ris_trace;

    std::vector<Bits> tx_codewords;  // K x n bits on air
    std::vector<Bits> tx_msgs;       // K x k info bits (coded schemes only)
    CMat tx_symbols;                 // K x S
    CMat rx;                         // M x S observed slots
};

struct FrameSetup {
    int M = 0;
    int N = 0;
    int K = 0;
    double sigma_n2 = 0.0;
    double E_x = 0.0;
    int alt_max_rounds = 20;
    double alt_tol = 1e-4;
};

/// Independent random streams for the orthogonal random inputs of one frame.
/// Keyed by (master seed, power index, frame index, purpose) and not by
/// scheme, so every scheme at a sweep point sees the same user drops, fading,
/// payload bits and noise: scheme comparisons are paired draw by draw instead
/// of riding on independent Monte Carlo realizations.
struct FrameStreams {
    Rng chan;     // user positions and fading blocks
    Rng surface;  // phase-profile initialization
    Rng payload;  // message / raw bits
    Rng noise;    // receiver noise
};

FrameStreams frame_streams(std::uint64_t master_seed,
                           std::uint64_t power_index,
                           std::uint64_t frame_index);

/// Draw one frame end to end: user positions (unless given), fading block,
/// surface optimization (RIS schemes), payload bits, transmit symbols,
/// received slots. Non-RIS schemes carry an N = 0 channel. `code` must be
/// non-null for coded schemes; uncoded schemes send n_bits raw bits/user.
FrameContext build_frame(Scheme scheme, const FrameSetup& setup,
                         const Geometry& base_geom,
                         const std::vector<Vec2>* fixed_users,
                         const Vec2& user_center, double user_radius,
                         const LdpcCode* code, int n_bits,
                         FrameStreams& streams);

/// Soft MMSE-SIC detection of a whole frame. priors (K x 2S, may be null for
/// the first pass) are the fed-back bit LLRs; the null fast path uses the
/// shared all-ones-delta filter bank, the general path rebuilds the filter
/// per terminal and slot from the prior-dependent residual variances.
struct FrameDetection {
    RMat llr;   // K x 2S extrinsic bit LLRs
    RMat mu;    // K x S effective gains
    RMat eta2;  // K x S residual variances
};
FrameDetection detect_frame(const FrameContext& ctx, const RMat* priors);

struct IterationStats {
    int iteration = 0;   // 1-based
    long bit_errors = 0; // on info bits
    long bits_counted = 0;
    RVec user_ber;
    double sum_rate = 0.0;  // slot-averaged sum of log2(1 + post-SIC SINR)
    int decoders_converged = 0;
};

struct FrameResult {
    std::vector<IterationStats> iterations;
    std::vector<Bits> decoded_msgs;  // K x k, from the last iteration
};

/// Full IDD loop on one frame: detect, decode every terminal, feed the
/// decoder extrinsics back as priors, repeat. Decoder state is not carried
/// across iterations.
FrameResult run_idd_frame(const FrameContext& ctx, const LdpcCode& code,
                          int idd_iterations, int bp_iters);

struct UncodedResult {
    long bit_errors = 0;
    long bits_counted = 0;
    RVec user_ber;
    double sum_rate = 0.0;  // sum of log2(1 + no-SIC SINR), slot-invariant
};

/// One-shot linear MMSE with hard per-axis decisions, no code.
UncodedResult uncoded_detect(const FrameContext& ctx);

}  // namespace risidd
