#pragma once

#include <vector>

#include "agingmimo/types.hpp"

namespace agingmimo {

/// Statistical description of one user for the large-system analysis of a
/// single data slot.  users[0] is the target.
struct DetEquivUser {
    double gain = 1.0;        // large-scale amplitude
    double data_power = 1.0;  // per-slot transmit power
    VecC beamformer;          // unit-norm transmit direction, length n_tx
    MatC est_cov;             // covariance of the channel estimate, N x N
    MatC err_cov;             // estimation-error covariance, N x N
    /// Optional unit-trace transmit covariance shape (n_tx x n_tx).  When
    /// non-empty it replaces beamformer * beamformer^H (e.g. I/n_tx for
    /// isotropic transmission); the per-slot power still multiplies it.
    MatC tx_shape;
};

/// Fixed point of the interference resolvent: iterates
///   T = ( sum_{k>=1 interferers} B_k / (1 + omega_k) + Theta + noise_var I )^{-1}
///   omega_k = tr(B_k T)
/// with B_k the interferer's estimate covariance contracted against its
/// transmit covariance and Theta the total estimation-error contribution of
/// all users (target included).
struct FixedPointResult {
    MatC t;                            // n_rx x n_rx resolvent at the fixed point
    VecR omega;                        // one entry per interferer (users[1..])
    std::vector<double> delta_history; // per-iteration update magnitudes
    int iterations = 0;
    bool converged = false;
};

FixedPointResult fixed_point(const std::vector<DetEquivUser>& users, double noise_var,
                             double tol = 1e-10, int max_iter = 500);

/// Second-order deterministic equivalent of the target's spectral efficiency:
/// mean SINR from the resolvent, SINR variance from the derivative system,
/// and se = log2(1 + mean) - var / (2 ln2 (1 + mean)^2).
struct SeDeterministic {
    double mean_sinr = 0.0;
    double variance = 0.0;
    double se = 0.0;
    VecR omega_prime;  // derivative of each interferer's omega
};

/// Evaluates the expansion at the supplied fixed point (which is treated as
/// given, not recomputed).  When fluctuation_cov is non-null it replaces the
/// target's estimate covariance inside the variance term only.
SeDeterministic se_deterministic(const std::vector<DetEquivUser>& users, double noise_var,
                                 const FixedPointResult& fp,
                                 const MatC* fluctuation_cov = nullptr);

/// Partial contraction of an N x N second-moment matrix against a receive-side
/// matrix t: out(q,q') = sum_{i,l} c(q*n_rx+i, q'*n_rx+l) * conj(t(i,l)), so
/// that <out, W> = <c, kron(W, t)> for every n_tx x n_tx W.
MatC g_operator(const MatC& c, const MatC& t);

/// Unit-norm maximizer of w^H conj(G) w for Hermitian G: the top eigenvector
/// of conj(G), with the largest-modulus entry rotated to the positive real
/// axis so the result is deterministic.
VecC optimal_beamformer(const MatC& g);

}  // namespace agingmimo
