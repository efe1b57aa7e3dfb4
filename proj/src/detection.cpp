#include "risidd/detection.hpp"

#include <cmath>
#include <vector>

#include "risidd/simd/kernels.hpp"

namespace risidd {

namespace {

double softplus(double x) {
    // log(1 + e^x), stable for large |x|
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double logsumexp2(double a, double b) {
    double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

SoftState soft_symbols(const RMat& priors, const Qpsk& q) {
    const int K = static_cast<int>(priors.rows());
    require(priors.cols() == 2, "soft_symbols: priors must be K x 2");
    require(priors.allFinite(), "soft_symbols: non-finite prior LLR");

    std::vector<double> buf(2 * K);
    for (int k = 0; k < K; ++k) {
        buf[2 * k] = priors(k, 0);
        buf[2 * k + 1] = priors(k, 1);
    }
    simd::clamp_abs(buf.data(), buf.size(), kLlrMax);
    std::vector<double> t(2 * K);
    simd::tanh_half(buf.data(), t.data(), buf.size());

    SoftState s;
    s.x_tilde.resize(K);
    s.var.resize(K);
    for (int k = 0; k < K; ++k) {
        cd xt{q.amp * t[2 * k], q.amp * t[2 * k + 1]};
        s.x_tilde(k) = xt;
        s.var(k) = std::clamp(q.es - std::norm(xt), 0.0, q.es);
    }
    return s;
}

CVec sic_cancel(const CVec& y, const CMat& H_eff, const SoftState& soft,
                int k) {
    const int K = static_cast<int>(H_eff.cols());
    require(y.size() == H_eff.rows(), "sic_cancel: y length != antenna count");
    require(soft.x_tilde.size() == K && soft.var.size() == K,
            "sic_cancel: soft state size mismatch");
    require(k >= 0 && k < K, "sic_cancel: bad terminal index");
    CVec r = y - H_eff * soft.x_tilde;
    r += soft.x_tilde(k) * H_eff.col(k);
    return r;
}

RVec make_delta(const RVec& var, double es, int k) {
    const int K = static_cast<int>(var.size());
    require(k >= 0 && k < K, "make_delta: bad terminal index");
    require(es > 0.0, "make_delta: symbol energy must be positive");
    RVec d = var / es;
    d = d.cwiseMax(0.0).cwiseMin(1.0);
    d(k) = 1.0;
    return d;
}

CVec mmse_filter(const CMat& H_eff, const RVec& delta, double noise_ratio,
                 int k) {
    const int K = static_cast<int>(H_eff.cols());
    require(delta.size() == K, "mmse_filter: delta size mismatch");
    require(k >= 0 && k < K, "mmse_filter: bad terminal index");
    require(noise_ratio > 0.0, "mmse_filter: noise ratio must be positive");
    require(delta(k) == 1.0, "mmse_filter: delta entry of detected terminal must be 1");
    require((delta.array() >= 0.0).all() && (delta.array() <= 1.0).all(),
            "mmse_filter: delta entries outside [0, 1]");
    require(H_eff.allFinite(), "mmse_filter: non-finite channel");

    const int M = static_cast<int>(H_eff.rows());
    CMat A = CMat::Identity(M, M) * noise_ratio;
    A.noalias() += H_eff * delta.asDiagonal() * H_eff.adjoint();
    return A.llt().solve(H_eff.col(k));
}

CMat mmse_filter_matrix(const CMat& H_eff, double noise_ratio) {
    require(noise_ratio > 0.0, "mmse_filter_matrix: noise ratio must be positive");
    require(H_eff.allFinite(), "mmse_filter_matrix: non-finite channel");
    const int M = static_cast<int>(H_eff.rows());
    CMat A = CMat::Identity(M, M) * noise_ratio;
    A.noalias() += H_eff * H_eff.adjoint();
    // columns of the solve are the per-terminal filters; rows of W are w_k^H
    return A.llt().solve(H_eff).adjoint();
}

cd estimate(const CVec& w, const CVec& y) {
    require(w.size() == y.size(), "estimate: length mismatch");
    return w.dot(y);  // w^H y
}

std::pair<double, double> bias_variance(const CVec& w, const CVec& h_k,
                                        double es) {
    require(w.size() == h_k.size(), "bias_variance: length mismatch");
    require(es > 0.0, "bias_variance: symbol energy must be positive");
    cd g = w.dot(h_k);  // w^H h_k
    if (std::abs(g.imag()) > 1e-9 * std::abs(g) )
        throw ContractError(
            "bias_variance: w^H h_k has significant imaginary part; filter is "
            "not MMSE for this channel column");
    double mu = g.real();
    double eta2 = std::max(es * (mu - mu * mu), 0.0);
    return {mu, eta2};
}

std::array<double, 2> extrinsic_llr(cd x_hat, double mu, double eta2,
                                    const std::array<double, 2>& priors,
                                    const Qpsk& q) {
    require(std::isfinite(x_hat.real()) && std::isfinite(x_hat.imag()),
            "extrinsic_llr: non-finite estimate");
    require(std::isfinite(mu) && std::isfinite(eta2) && eta2 >= 0.0,
            "extrinsic_llr: bad gain/variance");
    double eta2f = std::max(eta2, 1e-12 * q.es);

    // Gaussian metrics for the four constellation points
    double m[2][2];
    for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2)
            m[b1][b2] = -std::norm(x_hat - mu * q.point(b1, b2)) / eta2f;

    // log prior of the opposite bit, own-bit prior excluded (extrinsic)
    double lp1[2] = {-softplus(-priors[0]), -softplus(priors[0])};
    double lp2[2] = {-softplus(-priors[1]), -softplus(priors[1])};

    double l1 = logsumexp2(m[0][0] + lp2[0], m[0][1] + lp2[1]) -
                logsumexp2(m[1][0] + lp2[0], m[1][1] + lp2[1]);
    double l2 = logsumexp2(m[0][0] + lp1[0], m[1][0] + lp1[1]) -
                logsumexp2(m[0][1] + lp1[0], m[1][1] + lp1[1]);
    return {std::clamp(l1, -kLlrMax, kLlrMax), std::clamp(l2, -kLlrMax, kLlrMax)};
}

double sinr_no_sic(const CMat& W, const CMat& H_eff, double es,
                   double sigma_n2, int k) {
    const int K = static_cast<int>(H_eff.cols());
    require(W.rows() == K && W.cols() == H_eff.rows(),
            "sinr_no_sic: W must be K x M");
    require(k >= 0 && k < K, "sinr_no_sic: bad terminal index");
    require(es > 0.0 && sigma_n2 > 0.0, "sinr_no_sic: powers must be positive");
    Eigen::RowVectorXcd g = W.row(k) * H_eff;  // entries w_k^H h_j
    double sig = std::norm(g(k)) * es;
    double interf = g.squaredNorm() * es - sig;
    double noise = sigma_n2 * W.row(k).squaredNorm();
    return sig / (std::max(interf, 0.0) + noise);
}

double sinr_sic(double mu, double eta2, double es) {
    require(std::isfinite(mu) && std::isfinite(eta2) && eta2 >= 0.0,
            "sinr_sic: bad gain/variance");
    require(es > 0.0, "sinr_sic: symbol energy must be positive");
    double eta2f = std::max(eta2, 1e-12 * es);
    return mu * mu * es / eta2f;
}

double sum_rate(const RVec& sinrs) {
    require((sinrs.array() >= 0.0).all() && sinrs.allFinite(),
            "sum_rate: SINRs must be finite and nonnegative");
    double r = 0.0;
    for (int k = 0; k < sinrs.size(); ++k) r += std::log2(1.0 + sinrs(k));
    return r;
}

}  // namespace risidd
