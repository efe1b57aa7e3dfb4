#include "risidd/coding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "risidd/rng.hpp"
#include "risidd/simd/kernels.hpp"

namespace risidd {

namespace {

constexpr int kMaxAttempts = 200;

struct GrowthResult {
    std::vector<std::vector<int>> check_vars;
    std::vector<std::vector<int>> var_checks;
    bool ok = false;
};

// One attempt at growing a regular girth-6 Tanner graph.
GrowthResult grow_graph(int n, int m, int dv, int dc, Rng& rng) {
    GrowthResult g;
    g.check_vars.assign(m, {});
    g.var_checks.assign(n, {});
    std::vector<int> stamp(n, -1);
    std::vector<int> cand;
    cand.reserve(m);

    for (int v = 0; v < n; ++v) {
        for (int e = 0; e < dv; ++e) {
            // variables already sharing a check with v; attaching to a check
            // containing any of them would close a 4-cycle
            int tick = v * dv + e;
            for (int c : g.var_checks[v])
                for (int u : g.check_vars[c]) stamp[u] = tick;

            int best = dc;  // strictly less than dc required
            cand.clear();
            for (int c = 0; c < m; ++c) {
                int deg = static_cast<int>(g.check_vars[c].size());
                if (deg >= dc || deg > best) continue;
                bool bad = false;
                for (int u : g.check_vars[c]) {
                    if (u == v || stamp[u] == tick) {
                        bad = true;
                        break;
                    }
                }
                if (bad) continue;
                if (deg < best) {
                    best = deg;
                    cand.clear();
                }
                cand.push_back(c);
            }
            if (cand.empty()) return g;  // jammed, caller retries
            int c = cand[rng.next_u64() % cand.size()];
            g.check_vars[c].push_back(v);
            g.var_checks[v].push_back(c);
        }
    }
    g.ok = true;
    return g;
}

// GF(2) row reduction of the parity-check matrix; fills the encoder fields.
// Returns false when H is rank deficient (the attempt is then discarded so
// the advertised message length stays exact).
bool build_encoder(LdpcCode& code) {
    const int n = code.n, m = code.m;
    const int words = (n + 63) / 64;
    std::vector<std::vector<std::uint64_t>> rows(m,
                                                 std::vector<std::uint64_t>(words, 0));
    for (int c = 0; c < m; ++c)
        for (int v : code.check_vars[c]) rows[c][v >> 6] ^= 1ULL << (v & 63);

    auto get = [&](int r, int col) {
        return (rows[r][col >> 6] >> (col & 63)) & 1ULL;
    };

    std::vector<int> pivot_col;
    pivot_col.reserve(m);
    std::vector<char> is_pivot(n, 0);
    int r = 0;
    for (int col = 0; col < n && r < m; ++col) {
        int hit = -1;
        for (int r2 = r; r2 < m; ++r2)
            if (get(r2, col)) {
                hit = r2;
                break;
            }
        if (hit < 0) continue;
        std::swap(rows[r], rows[hit]);
        for (int r2 = 0; r2 < m; ++r2) {
            if (r2 == r || !get(r2, col)) continue;
            for (int w = 0; w < words; ++w) rows[r2][w] ^= rows[r][w];
        }
        pivot_col.push_back(col);
        is_pivot[col] = 1;
        ++r;
    }
    if (r < m) return false;

    code.info_cols.clear();
    std::vector<int> msg_index(n, -1);
    for (int col = 0; col < n; ++col)
        if (!is_pivot[col]) {
            msg_index[col] = static_cast<int>(code.info_cols.size());
            code.info_cols.push_back(col);
        }
    code.parity_cols = pivot_col;
    code.parity_deps.assign(m, {});
    for (int rr = 0; rr < m; ++rr)
        for (int col = 0; col < n; ++col)
            if (!is_pivot[col] && get(rr, col))
                code.parity_deps[rr].push_back(msg_index[col]);
    return true;
}

void build_edge_layout(LdpcCode& code) {
    code.edge_var.clear();
    code.edge_var.reserve(code.num_edges());
    code.var_edges.assign(code.n, {});
    int e = 0;
    for (int c = 0; c < code.m; ++c)
        for (int v : code.check_vars[c]) {
            code.edge_var.push_back(v);
            code.var_edges[v].push_back(e++);
        }
}

}  // namespace

LdpcCode construct_code(int n, double rate, int dv, int dc,
                        std::uint64_t seed) {
    require(n >= 4, "construct_code: block length too small");
    require(rate > 0.0 && rate < 1.0, "construct_code: rate must be in (0, 1)");
    require(dv >= 2 && dc > dv, "construct_code: need 2 <= dv < dc");
    const long m_l = std::lround(n * (1.0 - rate));
    require(m_l >= 1 && m_l < n, "construct_code: bad parity count");
    const int m = static_cast<int>(m_l);
    require(static_cast<long>(n) * dv == static_cast<long>(m) * dc,
            "construct_code: degree balance n*dv == m*dc violated for these "
            "parameters");

    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Rng rng(derive_stream(seed, 0x6c647063ULL, attempt));
        GrowthResult g = grow_graph(n, m, dv, dc, rng);
        if (!g.ok) continue;

        LdpcCode code;
        code.n = n;
        code.k = n - m;
        code.m = m;
        code.dv = dv;
        code.dc = dc;
        code.seed = seed;
        code.check_vars = std::move(g.check_vars);
        code.var_checks = std::move(g.var_checks);
        for (auto& cv : code.check_vars) std::sort(cv.begin(), cv.end());
        for (auto& vc : code.var_checks) std::sort(vc.begin(), vc.end());
        if (!build_encoder(code)) continue;
        build_edge_layout(code);
        return code;
    }
    throw NumericalError(
        "construct_code: failed to build a cycle-free regular graph after " +
        std::to_string(kMaxAttempts) + " attempts");
}

Bits encode(const LdpcCode& code, const Bits& msg) {
    require(static_cast<int>(msg.size()) == code.k,
            "encode: message length mismatch");
    for (auto b : msg) require(b <= 1, "encode: message bits must be 0/1");
    Bits c(code.n, 0);
    for (int i = 0; i < code.k; ++i) c[code.info_cols[i]] = msg[i];
    for (int r = 0; r < code.m; ++r) {
        std::uint8_t p = 0;
        for (int j : code.parity_deps[r]) p ^= msg[j];
        c[code.parity_cols[r]] = p;
    }
    return c;
}

Bits extract_message(const LdpcCode& code, const Bits& codeword) {
    require(static_cast<int>(codeword.size()) == code.n,
            "extract_message: codeword length mismatch");
    Bits msg(code.k);
    for (int i = 0; i < code.k; ++i) msg[i] = codeword[code.info_cols[i]];
    return msg;
}

bool syndrome_ok(const LdpcCode& code, const Bits& bits) {
    require(static_cast<int>(bits.size()) == code.n,
            "syndrome_ok: length mismatch");
    for (const auto& cv : code.check_vars) {
        std::uint8_t s = 0;
        for (int v : cv) s ^= bits[v];
        if (s) return false;
    }
    return true;
}

DecodeResult bp_decode(const LdpcCode& code, const std::vector<double>& llr_in,
                       int max_iters) {
    const int n = code.n, dc = code.dc;
    const int E = code.num_edges();
    require(static_cast<int>(llr_in.size()) == n, "bp_decode: LLR length mismatch");
    require(max_iters >= 1, "bp_decode: max_iters must be >= 1");
    for (double l : llr_in)
        require(std::isfinite(l), "bp_decode: non-finite input LLR");

    std::vector<double> lin = llr_in;
    simd::clamp_abs(lin.data(), lin.size(), kLlrMax);

    std::vector<double> v2c(E), t(E), loo(E), c2v(E, 0.0);
    std::vector<double> posterior = lin;
    Bits hard(n, 0);

    DecodeResult res;
    for (int it = 1; it <= max_iters; ++it) {
        res.iterations = it;
        for (int e = 0; e < E; ++e) v2c[e] = posterior[code.edge_var[e]] - c2v[e];
        simd::tanh_half(v2c.data(), t.data(), E);

        for (int c = 0; c < code.m; ++c) {
            const int base = c * dc;
            // prefix/suffix leave-one-out products, no division
            double pre = 1.0;
            for (int i = 0; i < dc; ++i) {
                loo[base + i] = pre;
                pre *= t[base + i];
            }
            double suf = 1.0;
            for (int i = dc - 1; i >= 0; --i) {
                loo[base + i] *= suf;
                suf *= t[base + i];
            }
        }
        simd::atanh2(loo.data(), c2v.data(), E);

        bool decided = true;
        for (int v = 0; v < n; ++v) {
            double p = lin[v];
            for (int e : code.var_edges[v]) p += c2v[e];
            posterior[v] = p;
            hard[v] = p < 0.0 ? 1 : 0;
            if (p == 0.0) decided = false;
        }
        if (decided && syndrome_ok(code, hard)) {
            res.converged = true;
            break;
        }
    }

    res.posterior = posterior;
    res.extrinsic.resize(n);
    for (int v = 0; v < n; ++v) res.extrinsic[v] = posterior[v] - lin[v];
    simd::clamp_abs(res.extrinsic.data(), n, kLlrMax);
    res.hard_bits = std::move(hard);
    return res;
}

std::vector<cd> map_bits_to_symbols(const Bits& bits, double es) {
    require(bits.size() % 2 == 0, "map_bits_to_symbols: odd bit count");
    require(es > 0.0, "map_bits_to_symbols: symbol energy must be positive");
    const double a = std::sqrt(es / 2.0);
    std::vector<cd> sym(bits.size() / 2);
    for (std::size_t i = 0; i < sym.size(); ++i) {
        require(bits[2 * i] <= 1 && bits[2 * i + 1] <= 1,
                "map_bits_to_symbols: bits must be 0/1");
        sym[i] = cd{a * (1.0 - 2.0 * bits[2 * i]),
                    a * (1.0 - 2.0 * bits[2 * i + 1])};
    }
    return sym;
}

Bits hard_demap(const std::vector<cd>& symbols) {
    Bits bits(2 * symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        bits[2 * i] = symbols[i].real() < 0.0 ? 1 : 0;
        bits[2 * i + 1] = symbols[i].imag() < 0.0 ? 1 : 0;
    }
    return bits;
}

void save_alist(const LdpcCode& code, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("save_alist: cannot open " + path);
    f << code.n << ' ' << code.m << '\n';
    f << code.dv << ' ' << code.dc << '\n';
    for (int v = 0; v < code.n; ++v)
        f << code.dv << (v + 1 == code.n ? '\n' : ' ');
    for (int c = 0; c < code.m; ++c)
        f << code.dc << (c + 1 == code.m ? '\n' : ' ');
    for (int v = 0; v < code.n; ++v) {
        for (std::size_t i = 0; i < code.var_checks[v].size(); ++i)
            f << code.var_checks[v][i] + 1
              << (i + 1 == code.var_checks[v].size() ? '\n' : ' ');
    }
    for (int c = 0; c < code.m; ++c) {
        for (std::size_t i = 0; i < code.check_vars[c].size(); ++i)
            f << code.check_vars[c][i] + 1
              << (i + 1 == code.check_vars[c].size() ? '\n' : ' ');
    }
    if (!f) throw std::runtime_error("save_alist: write failed for " + path);
}

LdpcCode load_alist(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_alist: cannot open " + path);
    auto fail = [&](const std::string& why) -> void {
        throw std::runtime_error("load_alist: " + why + " in " + path);
    };
    int n, m, dv, dc;
    if (!(f >> n >> m >> dv >> dc)) fail("bad header");
    if (n < 4 || m < 1 || dv < 2 || dc <= dv) fail("implausible dimensions");
    for (int v = 0; v < n; ++v) {
        int d;
        if (!(f >> d) || d != dv) fail("irregular column degree");
    }
    for (int c = 0; c < m; ++c) {
        int d;
        if (!(f >> d) || d != dc) fail("irregular row degree");
    }
    LdpcCode code;
    code.n = n;
    code.m = m;
    code.k = n - m;
    code.dv = dv;
    code.dc = dc;
    code.var_checks.assign(n, {});
    code.check_vars.assign(m, {});
    for (int v = 0; v < n; ++v)
        for (int i = 0; i < dv; ++i) {
            int c;
            if (!(f >> c) || c < 1 || c > m) fail("bad check index");
            code.var_checks[v].push_back(c - 1);
        }
    for (int c = 0; c < m; ++c)
        for (int i = 0; i < dc; ++i) {
            int v;
            if (!(f >> v) || v < 1 || v > n) fail("bad variable index");
            code.check_vars[c].push_back(v - 1);
        }
    // the two adjacency blocks must describe the same graph
    for (int c = 0; c < m; ++c)
        for (int v : code.check_vars[c])
            if (std::find(code.var_checks[v].begin(), code.var_checks[v].end(),
                          c) == code.var_checks[v].end())
                fail("inconsistent adjacency");
    for (auto& cv : code.check_vars) std::sort(cv.begin(), cv.end());
    for (auto& vc : code.var_checks) std::sort(vc.begin(), vc.end());
    if (!build_encoder(code)) fail("rank-deficient parity-check matrix");
    build_edge_layout(code);
    return code;
}

std::string code_cache_name(int n, double rate, int dv, int dc,
                            std::uint64_t seed) {
    std::ostringstream s;
    s << "ldpc_n" << n << "_r" << rate << "_dv" << dv << "_dc" << dc << "_s"
      << seed << ".alist";
    return s.str();
}

}  // namespace risidd
