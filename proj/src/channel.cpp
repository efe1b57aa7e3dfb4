#include "risidd/channel.hpp"

#include <cmath>

namespace risidd {

double path_loss_db(double d_m, PathLossModel model) {
    if (!(d_m >= 1.0))
        throw std::domain_error("path_loss_db: distance must be >= 1 m, got " +
                                std::to_string(d_m));
    double lg = std::log10(d_m);
    return model == PathLossModel::weak ? 41.2 + 28.7 * lg : 37.3 + 22.0 * lg;
}

double path_gain_amplitude(double d_m, PathLossModel model) {
    return std::sqrt(std::pow(10.0, -path_loss_db(d_m, model) / 10.0));
}

void Geometry::validate() const {
    require(!users.empty(), "geometry: no terminal positions");
    for (const auto& u : users) {
        require((u - ap).norm() >= 1.0, "geometry: terminal closer than 1 m to AP");
        require((u - ris).norm() >= 1.0, "geometry: terminal closer than 1 m to RIS");
    }
    require((ap - ris).norm() >= 1.0, "geometry: AP closer than 1 m to RIS");
}

std::vector<Vec2> sample_user_positions(Rng& rng, int K, const Vec2& center,
                                        double radius) {
    require(K >= 1, "sample_user_positions: K must be >= 1");
    require(radius >= 0.0, "sample_user_positions: negative radius");
    std::vector<Vec2> pts;
    pts.reserve(K);
    for (int k = 0; k < K; ++k) {
        // sqrt radius transform for uniform density over the disk
        double r = radius * std::sqrt(rng.uniform());
        double a = 2.0 * std::numbers::pi * rng.uniform();
        pts.emplace_back(center.x() + r * std::cos(a),
                         center.y() + r * std::sin(a));
    }
    return pts;
}

CMat sample_rayleigh(Rng& rng, int rows, int cols) {
    require(rows >= 0 && cols >= 0, "sample_rayleigh: negative dimension");
    CMat m(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) m(r, c) = rng.cnormal();
    return m;
}

ChannelSet build_channel_set(const Geometry& geom, int M, int N, int K,
                             double sigma_n2, double E_x, Rng& rng) {
    require(M >= 1 && K >= 1 && N >= 0, "build_channel_set: bad dimensions");
    require(static_cast<int>(geom.users.size()) == K,
            "build_channel_set: geometry has wrong number of terminals");
    require(sigma_n2 > 0.0 && E_x > 0.0, "build_channel_set: powers must be positive");
    geom.validate();

    ChannelSet cs;
    cs.sigma_n2 = sigma_n2;
    cs.E_x = E_x;

    cs.H = sample_rayleigh(rng, M, K);
    for (int k = 0; k < K; ++k) {
        double d = (geom.users[k] - geom.ap).norm();
        cs.H.col(k) *= path_gain_amplitude(d, PathLossModel::weak);
    }

    cs.G = sample_rayleigh(rng, M, N);
    if (N > 0) {
        double d_ar = (geom.ap - geom.ris).norm();
        cs.G *= path_gain_amplitude(d_ar, PathLossModel::strong);
    }

    cs.F = sample_rayleigh(rng, N, K);
    if (N > 0) {
        for (int k = 0; k < K; ++k) {
            double d = (geom.users[k] - geom.ris).norm();
            cs.F.col(k) *= path_gain_amplitude(d, PathLossModel::strong);
        }
    }
    return cs;
}

CMat assemble_effective_channel(const ChannelSet& cs, const PhaseVector& phi) {
    require(phi.size() == cs.G.cols(),
            "assemble_effective_channel: phase vector length != surface size");
    require(cs.G.rows() == cs.H.rows() && cs.F.cols() == cs.H.cols() &&
                cs.F.rows() == cs.G.cols(),
            "assemble_effective_channel: inconsistent channel dimensions");
    if (phi.size() == 0) return cs.H;
    return cs.H + cs.G * phi.asDiagonal() * cs.F;
}

CVec effective_channel_column(const ChannelSet& cs, const PhaseVector& phi,
                              int k) {
    require(k >= 0 && k < cs.K(), "effective_channel_column: bad terminal index");
    require(phi.size() == cs.G.cols(),
            "effective_channel_column: phase vector length != surface size");
    if (phi.size() == 0) return cs.H.col(k);
    // h_k + G diag(f_k) phi
    return cs.H.col(k) + cs.G * cs.F.col(k).cwiseProduct(phi);
}

}  // namespace risidd
