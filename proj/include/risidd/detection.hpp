#pragma once

#include <array>
#include <utility>

#include "risidd/types.hpp"

namespace risidd {

/// Gray-labelled QPSK with per-symbol energy es. Bit value b maps to the
/// antipodal level 1 - 2b on its axis: first bit -> real, second -> imag,
/// so L > 0 favours bit 0 (positive level).
struct Qpsk {
    double es;   // E[|x|^2]
    double amp;  // per-axis amplitude sqrt(es / 2)

    explicit Qpsk(double symbol_energy)
        : es(symbol_energy), amp(std::sqrt(symbol_energy / 2.0)) {
        require(symbol_energy > 0.0, "qpsk: symbol energy must be positive");
    }

    cd point(int b_re, int b_im) const {
        return {amp * (1.0 - 2.0 * b_re), amp * (1.0 - 2.0 * b_im)};
    }
};

/// Interference prior per terminal for one slot: conditional-mean symbols
/// and their residual variances given the fed-back LLRs.
struct SoftState {
    CVec x_tilde;  // K soft symbols
    RVec var;      // K residual variances, in [0, es]
};

/// Soft symbols from per-bit prior LLRs. priors is K x 2 (row k = the two
/// LLRs of terminal k for this slot). x_tilde_k = amp*(tanh(L1/2) +
/// j tanh(L2/2)), var_k = es - |x_tilde_k|^2.
SoftState soft_symbols(const RMat& priors, const Qpsk& q);

/// Interference-cancelled observation for terminal k:
/// y - sum_{j != k} x_tilde_j h_j (i.e. soft symbols of all others removed).
CVec sic_cancel(const CVec& y, const CMat& H_eff, const SoftState& soft, int k);

/// Residual-interference weighting for the filter of terminal k: entry j is
/// var_j / es for j != k and exactly 1 at k.
RVec make_delta(const RVec& var, double es, int k);

/// MMSE filter for terminal k under residual-interference weighting delta:
/// w_k = (noise_ratio I + H diag(delta) H^H)^{-1} h_k, solved in place
/// (no explicit inverse).
CVec mmse_filter(const CMat& H_eff, const RVec& delta, double noise_ratio,
                 int k);

/// All-ones-delta filter bank: row k of the result is w_k^H, so x_hat = W y.
CMat mmse_filter_matrix(const CMat& H_eff, double noise_ratio);

/// Filter output w^H y for one slot.
cd estimate(const CVec& w, const CVec& y);

/// Effective gain mu = Re(w^H h_k) of the filtered symbol and the variance
/// eta2 = es * (mu - mu^2) of everything else (residual interference plus
/// noise at the filter output). Throws ContractError if w^H h_k has a
/// relative imaginary part above 1e-9, which indicates w is not an MMSE
/// filter for h_k.
std::pair<double, double> bias_variance(const CVec& w, const CVec& h_k,
                                        double es);

/// Extrinsic LLRs for the two bits of one terminal from the Gaussian
/// observation model x_hat ~ CN(mu * x, eta2), with the other bit's prior
/// marginalized and the own bit's prior excluded. Outputs clamped to
/// +-kLlrMax; eta2 floored at 1e-12 * es.
std::array<double, 2> extrinsic_llr(cd x_hat, double mu, double eta2,
                                    const std::array<double, 2>& priors,
                                    const Qpsk& q);

/// Post-MMSE SINR of terminal k without interference cancellation:
/// |w^H h_k|^2 es over sum_{j != k} |w^H h_j|^2 es + sigma_n2 ||w||^2.
double sinr_no_sic(const CMat& W, const CMat& H_eff, double es,
                   double sigma_n2, int k);

/// Post-SIC SINR mu^2 es / eta2; equals mu / (1 - mu) when eta2 carries the
/// matched MMSE variance es (mu - mu^2).
double sinr_sic(double mu, double eta2, double es);

/// sum_k log2(1 + sinr_k), bits per channel use.
double sum_rate(const RVec& sinrs);

}  // namespace risidd
