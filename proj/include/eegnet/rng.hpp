#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "eegnet/tensor.hpp"

namespace eegnet {

/// Seeded generator with a fully specified output sequence.
///
/// Raw bits come from std::mt19937_64, whose sequence the C++ standard fixes.
/// The standard distributions are implementation-defined, so every derived
/// draw is computed here:
///   uniform   53 high bits scaled into [0, 1)
///   below(n)  rejection sampling on the raw 64-bit word
///   normal    Marsaglia polar method, second variate cached
/// The (seed, stream) pair is folded through splitmix64 into the engine seed,
/// so distinct streams from one user seed do not overlap in practice.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64() { return engine_(); }
    double uniform();
    std::uint64_t below(std::uint64_t n);
    double normal();

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Normal draws of the given shape; throws InvalidArgument if std < 0.
Tensor rng_normal(std::uint64_t seed, const Shape& shape, double mean, double std);

}  // namespace eegnet
