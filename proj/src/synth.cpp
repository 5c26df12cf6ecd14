#include "fsnull/synth.hpp"

#include <string>

#include "fsnull/error.hpp"
#include "fsnull/random.hpp"

namespace fsnull {

Dataset make_synthetic(const SynthOptions& options) {
    if (options.k < 2) throw Error(ErrorCode::InvalidArgument, "synth needs k >= 2");
    if (options.n < 2 * options.k) throw Error(ErrorCode::InvalidArgument, "synth needs n >= 2k");
    if (options.p == 0) throw Error(ErrorCode::InvalidArgument, "synth needs p >= 1");

    Xoshiro256 rng(options.seed);
    Matrix values(options.n, options.p);
    std::vector<std::string> raw(options.n), ids(options.n), names(options.p);
    for (std::size_t i = 0; i < options.n; ++i) {
        const std::size_t c = i % options.k;
        const double mean = static_cast<double>(c) * options.shift;
        for (std::size_t j = 0; j < options.p; ++j) values(i, j) = mean + rng.normal();
        raw[i] = "class" + std::to_string(c);
        ids[i] = "s" + std::to_string(i);
    }
    for (std::size_t j = 0; j < options.p; ++j) names[j] = "f" + std::to_string(j);
    return Dataset(DataMatrix(std::move(values), std::move(names), std::move(ids)),
                   LabelVector::from_strings(raw));
}

}  // namespace fsnull
