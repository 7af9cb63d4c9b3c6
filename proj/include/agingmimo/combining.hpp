#pragma once

#include <cmath>
#include <vector>

#include "agingmimo/types.hpp"

namespace agingmimo {

/// Permutation K with K * vec(X) = vec(X^T) for X of shape rows x cols.
MatR commutation(int rows, int cols);

/// Contract an N x N second-moment matrix (N = n_tx * n_rx, column-stacked
/// layout with the transmit index outer) against a transmit-signal covariance
/// cx (n_tx x n_tx): out(i,l) = sum_{q,q'} cx(q,q') d(q*n_rx+i, q'*n_rx+l).
/// For d = E[vec(H) vec(H)^H] this equals E[H cx H^H]; it maps Hermitian PSD
/// inputs to Hermitian PSD outputs when cx is Hermitian PSD.
MatC apply_A(const MatC& d, const MatC& cx, int n_rx);

/// Everything one interfering (or target) user contributes to the uplink
/// receive covariance in a data slot.
struct UserSignal {
    double gain = 1.0;        // large-scale amplitude
    double data_power = 1.0;  // per-slot transmit power
    VecC beamformer;          // unit-norm transmit direction, length n_tx
    VecC channel_est;         // column-stacked channel estimate, length n_tx*n_rx
    MatC error_cov;           // estimation-error covariance, N x N
};

struct CombinerResult {
    MatC rx_cov;          // F: full receive covariance (signal + interference + noise)
    VecC effective;       // u: target user's estimated effective channel H_1 w_1
    VecC combiner;        // g = c * F^{-1} u with c = gain_1 * sqrt(data_power_1)
    double sinr = 0.0;    // post-combining SINR of the target user
};

/// MMSE receive combining for users[0] (the target) against the rest.
CombinerResult mmse_combine(const std::vector<UserSignal>& users, double noise_var);

inline double se_bits(double sinr) { return std::log2(1.0 + sinr); }

}  // namespace agingmimo
