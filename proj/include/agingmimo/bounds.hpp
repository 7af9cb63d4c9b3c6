#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agingmimo/detequiv.hpp"
#include "agingmimo/types.hpp"

namespace agingmimo {

/// One Monte-Carlo estimate with a batch-means standard error (10 blocks;
/// zero for deterministic quantities).
struct BoundEstimate {
    std::string method;
    double value = 0.0;
    double stderr_value = 0.0;
};

/// Capacity-bound comparison for the target user of a single data slot whose
/// per-user statistics are given.  Channel estimates are drawn from est_cov,
/// true channels add an independent err_cov component, and every method is
/// evaluated on the same draws:
///   mc       mean of log2(1 + sinr) with the estimate-based MMSE combiner
///   jensen   log2(1 + mean sinr), an upper transform of the same samples
///   ngo      log2(1 + harmonic-mean lower-bound SINR from true channels)
///   utf      use-and-forget bound from first/second moments of the combiner
///            output against the true effective channels
///   hoydis   first-order deterministic equivalent (no sampling)
std::vector<BoundEstimate> bounds_compare(const std::vector<DetEquivUser>& users,
                                          double noise_var, int trials,
                                          std::uint64_t seed, int n_threads = 1);

}  // namespace agingmimo
