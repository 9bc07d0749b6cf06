#include "comemnet/rng.hpp"

#include <cmath>

namespace comemnet {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

} // namespace

Rng::Rng(std::uint64_t seed) : state_(seed) {
    // Warm up so nearby seeds do not yield nearby first outputs.
    for (int i = 0; i < 4; ++i) splitmix64(state_);
}

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

double Rng::normal(double mean, double stddev) {
    if (has_spare_) {
        has_spare_ = false;
        return mean + stddev * spare_;
    }
    // Box-Muller; 1-u keeps log away from zero.
    const double two_pi = 6.283185307179586476925286766559;
    double u1 = 1.0 - uniform01();
    double u2 = uniform01();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double z0 = radius * std::cos(two_pi * u2);
    spare_ = radius * std::sin(two_pi * u2);
    has_spare_ = true;
    return mean + stddev * z0;
}

std::size_t Rng::index(std::size_t n) {
    if (n == 0) return 0;
    return static_cast<std::size_t>(next_u64() % n);
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                          std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = base ^ fnv1a(tag);
    x ^= 0x9E3779B97F4A7C15ull * (a + 1);
    std::uint64_t y = splitmix64(x);
    x ^= 0xC2B2AE3D27D4EB4Full * (b + 1);
    return y ^ splitmix64(x);
}

} // namespace comemnet
