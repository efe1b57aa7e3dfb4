#pragma once

#include <vector>

#include "risidd/rng.hpp"
#include "risidd/types.hpp"

namespace risidd {

/// RIS phase profile: unit-modulus entries, one per surface element.
using PhaseVector = CVec;

/// Which large-scale attenuation law applies to a link.
/// `weak` models the obstructed terminal-to-AP path, `strong` the
/// RIS-assisted segments with favourable propagation.
enum class PathLossModel { weak, strong };

/// Attenuation in dB at distance d_m meters (d_m >= 1).
/// weak:   41.2 + 28.7 log10(d)
/// strong: 37.3 + 22.0 log10(d)
double path_loss_db(double d_m, PathLossModel model);

/// Amplitude scale sqrt(10^(-PL/10)) applied to unit-variance fading.
double path_gain_amplitude(double d_m, PathLossModel model);

/// Node placement on the 2-D deployment plane.
struct Geometry {
    Vec2 ap{0.0, -60.0};
    Vec2 ris{300.0, 10.0};
    std::vector<Vec2> users;  // one point per terminal

    void validate() const;
};

/// K points uniform on the disk of given radius around center.
std::vector<Vec2> sample_user_positions(Rng& rng, int K, const Vec2& center,
                                        double radius);

/// rows x cols matrix of i.i.d. CN(0, 1) entries.
CMat sample_rayleigh(Rng& rng, int rows, int cols);

/// One block-fading realization plus the operating powers.
/// H: M x K terminal-to-AP, G: M x N surface-to-AP,
/// F: N x K terminal-to-surface (column k serves terminal k).
struct ChannelSet {
    CMat H;
    CMat G;
    CMat F;
    double sigma_n2 = 0.0;  // per-antenna noise power
    double E_x = 0.0;       // per-symbol transmit energy

    int M() const { return static_cast<int>(H.rows()); }
    int K() const { return static_cast<int>(H.cols()); }
    int N() const { return static_cast<int>(G.cols()); }
    double noise_ratio() const { return sigma_n2 / E_x; }
};

/// Draw one fading block: Rayleigh entries scaled per link by the distance
/// attenuation (weak law for the direct links, strong law for both
/// RIS-assisted segments).
ChannelSet build_channel_set(const Geometry& geom, int M, int N, int K,
                             double sigma_n2, double E_x, Rng& rng);

/// H + G diag(phi) F. Dimension mismatches throw ContractError.
CMat assemble_effective_channel(const ChannelSet& cs, const PhaseVector& phi);

/// Column k of the effective channel: h_k + G diag(f_k) phi.
CVec effective_channel_column(const ChannelSet& cs, const PhaseVector& phi,
                              int k);

}  // namespace risidd
