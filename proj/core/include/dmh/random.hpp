#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace dmh {

// Pseudorandom source with a pinned algorithm so that seeds reproduce
// across standard libraries: mt19937_64 engine, 53-bit uniform doubles,
// Box-Muller normals and rejection-sampled bounded integers. The
// <random> distributions are implementation-defined and are not used.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal.
    double normal();

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace dmh
