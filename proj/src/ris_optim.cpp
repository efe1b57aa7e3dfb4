#include "risidd/ris_optim.hpp"

#include <cmath>

#include "risidd/detection.hpp"

namespace risidd {

double mse_objective(const CMat& W, const PhaseVector& phi,
                     const ChannelSet& cs) {
    const int K = cs.K();
    require(W.rows() == K && W.cols() == cs.M(), "mse_objective: W must be K x M");
    CMat E = CMat::Identity(K, K) - W * assemble_effective_channel(cs, phi);
    return cs.E_x * E.squaredNorm() + cs.sigma_n2 * W.squaredNorm();
}

CMat compute_beta(const CMat& W, const CMat& G, const CMat& F) {
    const int K = static_cast<int>(W.rows());
    const int N = static_cast<int>(G.cols());
    require(W.cols() == G.rows(), "compute_beta: W and G incompatible");
    require(F.rows() == N && F.cols() == K, "compute_beta: F must be N x K");
    CMat T = W * G;  // K x N, shared across terminals
    CMat beta = CMat::Zero(N, N);
    for (int k = 0; k < K; ++k) {
        CMat Tk = T * F.col(k).asDiagonal();
        beta.noalias() += Tk.adjoint() * Tk;
    }
    return beta;
}

CVec compute_psi(const CMat& W, const CMat& G, const CMat& F, const CMat& H) {
    const int K = static_cast<int>(W.rows());
    const int N = static_cast<int>(G.cols());
    require(W.cols() == G.rows(), "compute_psi: W and G incompatible");
    require(F.rows() == N && F.cols() == K, "compute_psi: F must be N x K");
    require(H.rows() == W.cols() && H.cols() == K, "compute_psi: H must be M x K");
    CMat T = W * G;
    CVec psi = CVec::Zero(N);
    for (int k = 0; k < K; ++k) {
        CVec e = CVec::Zero(K);
        e(k) = 1.0;
        CVec b = e - W * H.col(k);
        psi.noalias() += F.col(k).conjugate().asDiagonal() * (T.adjoint() * b);
    }
    return psi;
}

CVec solve_phase_relaxed(const CMat& beta, const CVec& psi) {
    const int N = static_cast<int>(beta.rows());
    require(beta.cols() == N && psi.size() == N,
            "solve_phase_relaxed: dimension mismatch");
    if (N == 0) return CVec{};

    double bnorm = beta.norm();
    double pnorm = psi.norm();
    if (bnorm == 0.0) {
        if (pnorm == 0.0) return CVec::Zero(N);
        throw NumericalError(
            "solve_phase_relaxed: quadratic term vanished with a nonzero "
            "linear term; phase subproblem is unbounded");
    }

    CVec phi = beta.ldlt().solve(psi);
    double resid = (beta * phi - psi).norm();
    if (resid <= 1e-8 * std::max(pnorm, 1e-300)) return phi;

    // plain solve failed (rank-deficient beta); load the diagonal once
    double reg = 1e-10 * beta.trace().real() / N;
    if (!(reg > 0.0))
        throw NumericalError("solve_phase_relaxed: singular quadratic term");
    CMat loaded = beta + reg * CMat::Identity(N, N);
    phi = loaded.ldlt().solve(psi);
    resid = (loaded * phi - psi).norm();
    if (!(resid <= 1e-6 * std::max(pnorm, 1e-300)))
        throw NumericalError("solve_phase_relaxed: regularized solve failed");
    return phi;
}

PhaseVector truncate_unit_modulus(const CVec& phi_relaxed) {
    PhaseVector out(phi_relaxed.size());
    for (int n = 0; n < phi_relaxed.size(); ++n) {
        double a = std::abs(phi_relaxed(n));
        out(n) = a == 0.0 ? cd{1.0, 0.0} : phi_relaxed(n) / a;
    }
    return out;
}

AltOptResult alternate_optimize(const ChannelSet& cs, int max_rounds,
                                double tol, Rng& rng) {
    require(max_rounds >= 1, "alternate_optimize: max_rounds must be >= 1");
    require(tol > 0.0, "alternate_optimize: tol must be positive");
    const int N = cs.N();
    const double nr = cs.noise_ratio();

    AltOptResult res;
    if (N == 0) {
        // no surface: plain MMSE, nothing to alternate over
        res.phi = PhaseVector{};
        res.W = mmse_filter_matrix(cs.H, nr);
        res.trace.mse_history.push_back(mse_objective(res.W, res.phi, cs));
        res.trace.iteration_count = 1;
        res.trace.converged = true;
        return res;
    }

    CVec phi(N);
    for (int n = 0; n < N; ++n) phi(n) = rng.unit_phase();
    CMat W = mmse_filter_matrix(assemble_effective_channel(cs, phi), nr);

    AltOptTrace trace;
    double prev = mse_objective(W, phi, cs);
    trace.mse_history.push_back(prev);

    // Returned profile: the best-scoring truncated candidate observed over
    // the run, seeded by the random unit-modulus start. The relaxed iterate
    // the loop advances on is free to grow the surface response beyond unit
    // modulus, so the last round's truncation is not reliably the best one.
    PhaseVector best_phi = phi;
    CMat best_W = W;
    double best_j = prev;

    for (int r = 0; r < max_rounds; ++r) {
        CMat beta = compute_beta(W, cs.G, cs.F);
        CVec psi = compute_psi(W, cs.G, cs.F, cs.H);
        phi = solve_phase_relaxed(beta, psi);
        W = mmse_filter_matrix(assemble_effective_channel(cs, phi), nr);
        double cur = mse_objective(W, phi, cs);
        trace.mse_history.push_back(cur);
        trace.iteration_count = r + 1;

        PhaseVector cand = truncate_unit_modulus(phi);
        CMat cand_W = mmse_filter_matrix(assemble_effective_channel(cs, cand),
                                         nr);
        double cand_j = mse_objective(cand_W, cand, cs);
        if (cand_j < best_j) {
            best_j = cand_j;
            best_phi = std::move(cand);
            best_W = std::move(cand_W);
        }

        if (std::abs(prev - cur) < tol * std::max(std::abs(prev), 1e-300)) {
            trace.converged = true;
            break;
        }
        prev = cur;
    }

    res.phi = std::move(best_phi);
    res.W = std::move(best_W);
    res.trace = std::move(trace);
    return res;
}

}  // namespace risidd
