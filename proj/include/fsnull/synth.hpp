#pragma once

#include <cstddef>
#include <cstdint>

#include "fsnull/data.hpp"

namespace fsnull {

/// Equal-covariance Gaussian classes: feature j of a class-c sample is
/// c * shift + N(0, 1), so every feature carries the same weak signal.
struct SynthOptions {
    std::size_t n = 200;
    std::size_t p = 2000;
    std::size_t k = 2;
    double shift = 0.05;
    std::uint64_t seed = 7;
};

/// Sample i belongs to class i mod k; classes are named class0.., features
/// f0.. and samples s0...
Dataset make_synthetic(const SynthOptions& options);

}  // namespace fsnull
