#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "arriva/rng.hpp"

namespace arriva {

struct BootstrapConfig {
    int replications = 999;
    double expected_block_length = 29.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (replications < 1) throw std::invalid_argument("BootstrapConfig: replications >= 1");
        if (!(expected_block_length >= 1.0))
            throw std::invalid_argument("BootstrapConfig: block length >= 1");
    }
};

/// One stationary-bootstrap index sequence: geometric block lengths with the
/// configured mean, wrapping circularly.
inline std::vector<std::uint32_t> stationary_bootstrap_indices(std::size_t n,
                                                               double mean_block_length,
                                                               Rng& rng) {
    if (n == 0) throw std::invalid_argument("stationary_bootstrap_indices: empty sample");
    std::vector<std::uint32_t> idx(n);
    std::size_t filled = 0;
    while (filled < n) {
        std::size_t start = static_cast<std::size_t>(rng.uniform_index(n));
        long long len = rng.geometric_length(mean_block_length);
        for (long long j = 0; j < len && filled < n; ++j)
            idx[filled++] = static_cast<std::uint32_t>((start + static_cast<std::size_t>(j)) % n);
    }
    return idx;
}

/// The full replication set for one test run, derived deterministically from
/// the config seed so replication b is the same whatever order it is drawn in.
inline std::vector<std::vector<std::uint32_t>> bootstrap_replications(
    std::size_t n, const BootstrapConfig& cfg, std::string_view tag) {
    cfg.validate();
    std::vector<std::vector<std::uint32_t>> reps(static_cast<std::size_t>(cfg.replications));
    for (int b = 0; b < cfg.replications; ++b) {
        Rng rng(derive_seed(cfg.seed, tag, b));
        reps[static_cast<std::size_t>(b)] =
            stationary_bootstrap_indices(n, cfg.expected_block_length, rng);
    }
    return reps;
}

}  // namespace arriva
