#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace comemnet {

// Deterministic PRNG used everywhere randomness is needed. Keeps its own
// Box-Muller and bounded-int logic so streams do not depend on the standard
// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    double uniform01(); // [0, 1)
    double uniform(double lo, double hi);
    double normal(double mean, double stddev);
    // Uniform integer in [0, n).
    std::size_t index(std::size_t n);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            std::size_t j = index(i + 1);
            std::swap(v[i], v[j]);
        }
    }

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Derives an independent stream seed from a base seed, a purpose tag and up to
// two integer qualifiers (period index, epoch index, ...).
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                          std::uint64_t a = 0, std::uint64_t b = 0);

} // namespace comemnet
