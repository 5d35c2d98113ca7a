#pragma once

#include <cstdint>
#include <random>

namespace treecount {

// Every random draw in the library goes through Rng: std::mt19937_64 plus
// hand-rolled rejection/threshold sampling. The Mersenne engine is fully
// specified by the standard, so a given seed reproduces the same stream on
// any platform (std::uniform_int_distribution and friends are not portable
// and are deliberately avoided).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform integer in [0, bound), rejection-sampled so the result is
    // exactly uniform.
    std::uint32_t below(std::uint32_t bound) {
        const std::uint64_t limit =
            (UINT64_MAX / bound) * static_cast<std::uint64_t>(bound);
        std::uint64_t x = gen_();
        while (x >= limit) x = gen_();
        return static_cast<std::uint32_t>(x % bound);
    }

    // Uniform double in [0, 1) built from the top 53 bits.
    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // unit() < 1 always, so p = 1 means "always true".
    bool bernoulli(double p) { return unit() < p; }

private:
    std::mt19937_64 gen_;
};

}  // namespace treecount
