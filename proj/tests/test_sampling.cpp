#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <tuple>
#include <unordered_set>

#include "fsnull/error.hpp"
#include "fsnull/random.hpp"
#include "fsnull/sampling.hpp"

using namespace fsnull;

namespace {

// Reference SplitMix64 written out independently of the library.
std::uint64_t reference_splitmix(std::uint64_t state) {
    std::uint64_t z = state + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<std::size_t> canonical_schedule() {
    std::vector<std::size_t> s;
    for (std::size_t i = 1; i <= 50; ++i) s.push_back(i);
    for (std::size_t i = 60; i <= 200; i += 10) s.push_back(i);
    for (std::size_t i = 300; i <= 2000; i += 100) s.push_back(i);
    return s;
}

}  // namespace

TEST_CASE("splitmix64 reference value") {
    CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
    for (std::uint64_t s : {1ULL, 42ULL, 0xFFFFFFFFFFFFFFFFULL}) CHECK(splitmix64(s) == reference_splitmix(s));
}

TEST_CASE("derive_seed follows the documented mixing formula") {
    const SeedContext ctx{42, "random"};
    const std::uint64_t expected =
        reference_splitmix(42ULL ^ fnv1a64("random") ^ (10ULL * 0x9E3779B97F4A7C15ULL) ^ (3ULL * 0xBF58476D1CE4E5B9ULL));
    CHECK(derive_seed(ctx, 10, 3) == expected);
    CHECK(derive_seed(ctx, 10, 0) != derive_seed(ctx, 10, 1));
    CHECK(derive_seed(ctx, 10, 0) == derive_seed(ctx, 10, 0));
    CHECK(fnv1a64("") == 0xCBF29CE484222325ULL);
    CHECK(fnv1a64("a") == 0xAF63DC4C8601EC8CULL);
}

TEST_CASE("derive_seed has no collisions on a million random triples") {
    std::mt19937_64 gen(5);
    std::unordered_set<std::uint64_t> outputs;
    const char* tags[] = {"random", "full", "ensemble", "split"};
    std::size_t distinct_inputs = 0;
    std::set<std::tuple<std::uint64_t, int, std::uint64_t, std::uint64_t>> triples;
    while (distinct_inputs < 1'000'000) {
        const std::uint64_t master = gen() % 1000;
        const int tag = static_cast<int>(gen() % 4);
        const std::uint64_t size = gen() % 2001, run = gen() % 20;
        if (!triples.emplace(master, tag, size, run).second) continue;
        ++distinct_inputs;
        outputs.insert(derive_seed({master, tags[tag]}, size, run));
    }
    CHECK(outputs.size() == 1'000'000);
}

TEST_CASE("schedule sizes") {
    const auto canon = canonical_schedule();
    CHECK(build_schedule(54675).sizes == canon);
    CHECK(build_schedule(2000).sizes.size() == 83);
    CHECK(build_schedule(500).sizes.size() == 68);
    CHECK(build_schedule(500).sizes.back() == 500);
    CHECK(build_schedule(1).sizes == std::vector<std::size_t>{1});
    for (std::size_t p : {1, 7, 50, 51, 199, 200, 201, 999, 1999, 5000}) {
        std::vector<std::size_t> expected;
        std::copy_if(canon.begin(), canon.end(), std::back_inserter(expected), [&](auto s) { return s <= p; });
        const auto got = build_schedule(p).sizes;
        CHECK(got == expected);
        CHECK(std::is_sorted(got.begin(), got.end()));
        const auto bigger = build_schedule(p + 137).sizes;
        CHECK(std::includes(bigger.begin(), bigger.end(), got.begin(), got.end()));
    }
}

TEST_CASE("sample_subset basic contracts") {
    const auto all = sample_subset(12, 12, 3);
    for (std::size_t i = 0; i < 12; ++i) CHECK(all.indices[i] == i);
    CHECK(sample_subset(1000, 17, 9).indices == sample_subset(1000, 17, 9).indices);
    CHECK(sample_subset(1000, 17, 9).seed == 9);
    CHECK_THROWS_AS(sample_subset(5, 6, 1), Error);
    CHECK_THROWS_AS(sample_subset(5, 0, 1), Error);
}

TEST_CASE("sample_subset output is sorted, distinct and in range") {
    std::mt19937_64 gen(17);
    for (int t = 0; t < 2000; ++t) {
        const std::size_t p = 1 + gen() % 60000;
        const std::size_t m = 1 + gen() % std::min<std::size_t>(p, 2000);
        const auto s = sample_subset(p, m, gen());
        REQUIRE(s.size() == m);
        CHECK(std::adjacent_find(s.indices.begin(), s.indices.end(), std::greater_equal<>()) == s.indices.end());
        CHECK(s.indices.back() < p);
    }
}

TEST_CASE("sparse and dense sampling paths agree") {
    // The sparse path applies when 4m < p; a prefix of the same Fisher-Yates
    // stream must give the same draw regardless of which path runs. Compare
    // against a plain dense reference implementation.
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const std::size_t p = 500, m = 1 + seed % 100;
        Xoshiro256 rng(seed);
        std::vector<std::size_t> pool(p);
        for (std::size_t i = 0; i < p; ++i) pool[i] = i;
        for (std::size_t i = 0; i < m; ++i) std::swap(pool[i], pool[i + rng.uniform_index(p - i)]);
        std::vector<std::size_t> expected(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));
        std::sort(expected.begin(), expected.end());
        CHECK(sample_subset(p, m, seed).indices == expected);
    }
}

TEST_CASE("sample_subset selects every index uniformly") {
    std::vector<std::size_t> counts(20, 0);
    const int draws = 100000;
    for (int d = 0; d < draws; ++d) {
        for (auto i : sample_subset(20, 5, child_seed(77, static_cast<std::uint64_t>(d))).indices) ++counts[i];
    }
    for (auto c : counts) CHECK(std::abs(static_cast<double>(c) / draws - 0.25) < 0.01);
}

TEST_CASE("xoshiro helpers stay in range") {
    Xoshiro256 rng(1);
    double sum = 0, sumsq = 0;
    for (int i = 0; i < 100000; ++i) {
        CHECK(rng.uniform_index(7) < 7);
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double z = rng.normal();
        sum += z;
        sumsq += z * z;
    }
    CHECK(std::abs(sum / 100000) < 0.02);
    CHECK(std::abs(sumsq / 100000 - 1.0) < 0.02);
}
