#include "risidd/idd.hpp"

#include <cmath>

namespace risidd {

bool scheme_is_coded(Scheme s) {
    return s == Scheme::idd || s == Scheme::ris_idd;
}

bool scheme_uses_ris(Scheme s) {
    return s == Scheme::ris || s == Scheme::ris_idd;
}

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::mmse: return "mmse";
        case Scheme::ris: return "ris";
        case Scheme::idd: return "idd";
        case Scheme::ris_idd: return "ris_idd";
    }
    return "?";
}

std::optional<Scheme> parse_scheme(const std::string& name) {
    if (name == "mmse") return Scheme::mmse;
    if (name == "ris") return Scheme::ris;
    if (name == "idd") return Scheme::idd;
    if (name == "ris_idd") return Scheme::ris_idd;
    return std::nullopt;
}

FrameStreams frame_streams(std::uint64_t master_seed,
                           std::uint64_t power_index,
                           std::uint64_t frame_index) {
    auto tag = [&](std::uint64_t purpose) {
        return derive_stream(master_seed, power_index, frame_index, purpose);
    };
    return FrameStreams{Rng(tag(1)), Rng(tag(2)), Rng(tag(3)), Rng(tag(4))};
}

FrameContext build_frame(Scheme scheme, const FrameSetup& setup,
                         const Geometry& base_geom,
                         const std::vector<Vec2>* fixed_users,
                         const Vec2& user_center, double user_radius,
                         const LdpcCode* code, int n_bits,
                         FrameStreams& streams) {
    const bool coded = scheme_is_coded(scheme);
    const bool ris = scheme_uses_ris(scheme);
    require(!coded || code != nullptr, "build_frame: coded scheme needs a code");
    if (coded) n_bits = code->n;
    require(n_bits >= 2 && n_bits % 2 == 0,
            "build_frame: bits per terminal must be even and positive");

    FrameContext ctx;
    Geometry geom = base_geom;
    geom.users = fixed_users
                     ? *fixed_users
                     : sample_user_positions(streams.chan, setup.K, user_center,
                                             user_radius);

    ctx.cs = build_channel_set(geom, setup.M, ris ? setup.N : 0, setup.K,
                               setup.sigma_n2, setup.E_x, streams.chan);
    if (ris) {
        AltOptResult opt = alternate_optimize(ctx.cs, setup.alt_max_rounds,
                                              setup.alt_tol, streams.surface);
        ctx.phi = std::move(opt.phi);
        ctx.W = std::move(opt.W);
        ctx.ris_trace = std::move(opt.trace);
    } else {
        ctx.phi = PhaseVector{};
        ctx.W = mmse_filter_matrix(ctx.cs.H, ctx.cs.noise_ratio());
    }
    ctx.H_eff = assemble_effective_channel(ctx.cs, ctx.phi);

    const int K = setup.K;
    const int S = n_bits / 2;
    ctx.tx_codewords.resize(K);
    if (coded) ctx.tx_msgs.resize(K);
    ctx.tx_symbols.resize(K, S);
    for (int k = 0; k < K; ++k) {
        if (coded) {
            Bits msg(code->k);
            for (auto& b : msg) b = streams.payload.next_u64() & 1;
            ctx.tx_msgs[k] = msg;
            ctx.tx_codewords[k] = encode(*code, msg);
        } else {
            Bits raw(n_bits);
            for (auto& b : raw) b = streams.payload.next_u64() & 1;
            ctx.tx_codewords[k] = std::move(raw);
        }
        auto sym = map_bits_to_symbols(ctx.tx_codewords[k], setup.E_x);
        for (int s = 0; s < S; ++s) ctx.tx_symbols(k, s) = sym[s];
    }

    ctx.rx = ctx.H_eff * ctx.tx_symbols;
    const double nsd = std::sqrt(setup.sigma_n2);
    for (int s = 0; s < S; ++s)
        for (int mm = 0; mm < setup.M; ++mm)
            ctx.rx(mm, s) += nsd * streams.noise.cnormal();
    return ctx;
}

FrameDetection detect_frame(const FrameContext& ctx, const RMat* priors) {
    const int K = ctx.cs.K();
    const int S = static_cast<int>(ctx.rx.cols());
    const Qpsk q(ctx.cs.E_x);
    const double nr = ctx.cs.noise_ratio();

    FrameDetection out;
    out.llr.resize(K, 2 * S);
    out.mu.resize(K, S);
    out.eta2.resize(K, S);

    if (priors == nullptr) {
        // first pass: no feedback, every slot shares the all-ones-delta bank
        std::vector<CVec> w(K);
        std::vector<double> mu(K), eta2(K);
        for (int k = 0; k < K; ++k) {
            w[k] = ctx.W.row(k).adjoint();
            auto [m, e2] = bias_variance(w[k], ctx.H_eff.col(k), q.es);
            mu[k] = m;
            eta2[k] = e2;
        }
        const std::array<double, 2> zero{0.0, 0.0};
        for (int s = 0; s < S; ++s)
            for (int k = 0; k < K; ++k) {
                cd xh = estimate(w[k], ctx.rx.col(s));
                auto l = extrinsic_llr(xh, mu[k], eta2[k], zero, q);
                out.llr(k, 2 * s) = l[0];
                out.llr(k, 2 * s + 1) = l[1];
                out.mu(k, s) = mu[k];
                out.eta2(k, s) = eta2[k];
            }
        return out;
    }

    require(priors->rows() == K && priors->cols() == 2 * S,
            "detect_frame: priors must be K x 2S");
    RMat slot_priors(K, 2);
    for (int s = 0; s < S; ++s) {
        slot_priors.col(0) = priors->col(2 * s);
        slot_priors.col(1) = priors->col(2 * s + 1);
        SoftState soft = soft_symbols(slot_priors, q);
        for (int k = 0; k < K; ++k) {
            CVec y_k = sic_cancel(ctx.rx.col(s), ctx.H_eff, soft, k);
            RVec delta = make_delta(soft.var, q.es, k);
            CVec w = mmse_filter(ctx.H_eff, delta, nr, k);
            cd xh = estimate(w, y_k);
            auto [m, e2] = bias_variance(w, ctx.H_eff.col(k), q.es);
            std::array<double, 2> pr{slot_priors(k, 0), slot_priors(k, 1)};
            auto l = extrinsic_llr(xh, m, e2, pr, q);
            out.llr(k, 2 * s) = l[0];
            out.llr(k, 2 * s + 1) = l[1];
            out.mu(k, s) = m;
            out.eta2(k, s) = e2;
        }
    }
    return out;
}

namespace {

double slot_avg_sic_sum_rate(const FrameDetection& det, double es) {
    const int K = static_cast<int>(det.mu.rows());
    const int S = static_cast<int>(det.mu.cols());
    double acc = 0.0;
    for (int s = 0; s < S; ++s)
        for (int k = 0; k < K; ++k)
            acc += std::log2(1.0 + sinr_sic(det.mu(k, s), det.eta2(k, s), es));
    return acc / S;
}

}  // namespace

FrameResult run_idd_frame(const FrameContext& ctx, const LdpcCode& code,
                          int idd_iterations, int bp_iters) {
    require(idd_iterations >= 1, "run_idd_frame: need at least one iteration");
    const int K = ctx.cs.K();
    const int S = static_cast<int>(ctx.rx.cols());
    require(code.n == 2 * S, "run_idd_frame: code length != 2 * slots");
    require(static_cast<int>(ctx.tx_msgs.size()) == K,
            "run_idd_frame: frame carries no encoded messages");

    FrameResult res;
    res.decoded_msgs.assign(K, Bits(code.k, 0));
    RMat priors;  // decoder extrinsics fed back as detector priors
    std::vector<double> llr_row(code.n);

    for (int it = 1; it <= idd_iterations; ++it) {
        FrameDetection det = detect_frame(ctx, it == 1 ? nullptr : &priors);

        IterationStats st;
        st.iteration = it;
        st.user_ber.resize(K);
        st.sum_rate = slot_avg_sic_sum_rate(det, ctx.cs.E_x);
        if (it == 1) priors.resize(K, code.n);

        for (int k = 0; k < K; ++k) {
            for (int b = 0; b < code.n; ++b) llr_row[b] = det.llr(k, b);
            DecodeResult dec = bp_decode(code, llr_row, bp_iters);
            for (int b = 0; b < code.n; ++b) priors(k, b) = dec.extrinsic[b];
            if (dec.converged) ++st.decoders_converged;

            Bits msg = extract_message(code, dec.hard_bits);
            long err = 0;
            for (int i = 0; i < code.k; ++i) err += msg[i] != ctx.tx_msgs[k][i];
            st.bit_errors += err;
            st.bits_counted += code.k;
            st.user_ber(k) = static_cast<double>(err) / code.k;
            if (it == idd_iterations) res.decoded_msgs[k] = std::move(msg);
        }
        res.iterations.push_back(std::move(st));
    }
    return res;
}

UncodedResult uncoded_detect(const FrameContext& ctx) {
    const int K = ctx.cs.K();
    const int S = static_cast<int>(ctx.rx.cols());
    UncodedResult res;
    res.user_ber.resize(K);

    CMat xh = ctx.W * ctx.rx;  // K x S
    std::vector<cd> row(S);
    for (int k = 0; k < K; ++k) {
        for (int s = 0; s < S; ++s) row[s] = xh(k, s);
        Bits bits = hard_demap(row);
        long err = 0;
        for (int b = 0; b < 2 * S; ++b) err += bits[b] != ctx.tx_codewords[k][b];
        res.bit_errors += err;
        res.bits_counted += 2 * S;
        res.user_ber(k) = static_cast<double>(err) / (2 * S);
    }

    RVec sinrs(K);
    for (int k = 0; k < K; ++k)
        sinrs(k) = sinr_no_sic(ctx.W, ctx.H_eff, ctx.cs.E_x, ctx.cs.sigma_n2, k);
    res.sum_rate = sum_rate(sinrs);
    return res;
}

}  // namespace risidd
