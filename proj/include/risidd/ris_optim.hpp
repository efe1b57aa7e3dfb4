#pragma once

#include <vector>

#include "risidd/channel.hpp"
#include "risidd/rng.hpp"
#include "risidd/types.hpp"

namespace risidd {

/// Sum-MSE of the joint linear receive filter W (rows w_k^H) over the
/// effective channel at phase profile phi:
///   E_x ||I - W H_eff||_F^2 + sigma_n2 ||W||_F^2.
double mse_objective(const CMat& W, const PhaseVector& phi,
                     const ChannelSet& cs);

/// Quadratic form of the relaxed phase subproblem:
/// beta = sum_k (W G diag(f_k))^H (W G diag(f_k)), N x N Hermitian PSD.
CMat compute_beta(const CMat& W, const CMat& G, const CMat& F);

/// Linear term of the relaxed phase subproblem:
/// psi = sum_k (W G diag(f_k))^H (e_k - W h_k), with the direct-link column
/// h_k on the right-hand side.
CVec compute_psi(const CMat& W, const CMat& G, const CMat& F, const CMat& H);

/// Solve beta phi = psi for the unconstrained (relaxed) phase profile.
/// A failed plain solve falls back once to Tikhonov loading
/// eps * tr(beta)/N with eps = 1e-10; an all-zero beta with nonzero psi
/// throws NumericalError.
CVec solve_phase_relaxed(const CMat& beta, const CVec& psi);

/// Project onto unit modulus elementwise; zero entries map to 1 + 0j.
PhaseVector truncate_unit_modulus(const CVec& phi_relaxed);

struct AltOptTrace {
    int iteration_count = 0;
    std::vector<double> mse_history;  // objective at the relaxed iterates
    bool converged = false;
};

struct AltOptResult {
    CMat W;           // filter matched to the truncated phases
    PhaseVector phi;  // unit-modulus profile
    AltOptTrace trace;
};

/// Alternating minimization of the sum-MSE over (W, phi): phi update is the
/// exact relaxed minimizer, W update the exact MMSE filter bank, so the
/// recorded history is non-increasing. Initial phases are i.i.d. uniform on
/// the unit circle from rng. Stops when the relative objective change drops
/// below tol or after max_rounds. Each round's relaxed solution is truncated
/// to unit modulus and scored with its matched filter bank; the returned
/// (phi, W) is the best-scoring truncated candidate of the run.
AltOptResult alternate_optimize(const ChannelSet& cs, int max_rounds,
                                double tol, Rng& rng);

}  // namespace risidd
