#include "fsnull/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "fsnull/error.hpp"
#include "fsnull/random.hpp"

namespace fsnull {

SubsetSchedule build_schedule(std::size_t n_features) {
    SubsetSchedule schedule;
    auto add = [&](std::size_t size) {
        if (size <= n_features) schedule.sizes.push_back(size);
    };
    for (std::size_t s = 1; s <= 50; ++s) add(s);
    for (std::size_t s = 60; s <= 200; s += 10) add(s);
    for (std::size_t s = 300; s <= 2000; s += 100) add(s);
    if (schedule.sizes.empty()) schedule.sizes.push_back(1);
    return schedule;
}

std::uint64_t derive_seed(const SeedContext& ctx, std::uint64_t size, std::uint64_t run) {
    const std::uint64_t mixed = ctx.master_seed ^ fnv1a64(ctx.mode_tag) ^
                                (size * 0x9E3779B97F4A7C15ULL) ^ (run * 0xBF58476D1CE4E5B9ULL);
    return splitmix64(mixed);
}

FeatureSubset sample_subset(std::size_t p, std::size_t m, std::uint64_t seed) {
    if (m == 0 || m > p) {
        throw Error(ErrorCode::SizeExceedsFeatures, "cannot draw " + std::to_string(m) +
                                                        " distinct features out of " +
                                                        std::to_string(p));
    }
    FeatureSubset subset;
    subset.seed = seed;
    Xoshiro256 rng(seed);

    if (m * 4 < p) {
        // Sparse Fisher-Yates: only the displaced slots are materialised.
        std::unordered_map<std::size_t, std::size_t> displaced;
        displaced.reserve(2 * m);
        auto slot = [&](std::size_t i) {
            const auto it = displaced.find(i);
            return it == displaced.end() ? i : it->second;
        };
        subset.indices.reserve(m);
        for (std::size_t i = 0; i < m; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.uniform_index(p - i));
            const std::size_t vi = slot(i);
            const std::size_t vj = slot(j);
            displaced[j] = vi;
            subset.indices.push_back(vj);
        }
    } else {
        std::vector<std::size_t> pool(p);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t i = 0; i < m; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.uniform_index(p - i));
            std::swap(pool[i], pool[j]);
        }
        subset.indices.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));
    }
    std::sort(subset.indices.begin(), subset.indices.end());
    return subset;
}

}  // namespace fsnull
