#pragma once

#include <cstdint>
#include <random>

namespace ivreg {

/// Seeded generator handed around by value; no global state.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform sample in [lo, hi].
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * std::generate_canonical<double, 53>(engine_);
    }

    /// Independent child stream; used to give each noise source its own sequence.
    Rng split(std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(engine_() >> 32), static_cast<std::uint32_t>(stream),
                          static_cast<std::uint32_t>(stream >> 32)};
        std::mt19937_64 child(seq);
        return Rng(child);
    }

private:
    explicit Rng(std::mt19937_64 engine) : engine_(engine) {}
    std::mt19937_64 engine_;
};

}  // namespace ivreg
