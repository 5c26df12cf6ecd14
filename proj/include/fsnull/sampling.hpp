#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fsnull {

/// Random-subset sizes: 1..50, 60..200 step 10, 300..2000 step 100,
/// restricted to sizes not exceeding the feature count.
struct SubsetSchedule {
    std::vector<std::size_t> sizes;
};

struct FeatureSubset {
    std::vector<std::size_t> indices;  // sorted, distinct
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return indices.size(); }
};

struct SeedContext {
    std::uint64_t master_seed = 42;
    std::string mode_tag;
};

SubsetSchedule build_schedule(std::size_t n_features);

/// Order-independent seed for one (size, run) cell of an experiment grid:
///   splitmix64(master ^ fnv1a64(tag) ^ size * 0x9E3779B97F4A7C15 ^ run * 0xBF58476D1CE4E5B9)
std::uint64_t derive_seed(const SeedContext& ctx, std::uint64_t size, std::uint64_t run);

/// `m` distinct indices out of [0, p), uniformly, by partial Fisher-Yates
/// over a xoshiro256** stream. Returned sorted.
FeatureSubset sample_subset(std::size_t p, std::size_t m, std::uint64_t seed);

}  // namespace fsnull
