#include "mrpred/rng.hpp"

namespace mrpred {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace

std::uint64_t Rng::next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
}

std::uint64_t Rng::bounded(std::uint64_t n) {
    // Rejection sampling over the largest multiple of n.
    const std::uint64_t threshold = (0ULL - n) % n;
    for (;;) {
        const std::uint64_t x = next();
        if (x >= threshold) return x % n;
    }
}

double Rng::uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

bool Rng::coin(double p) {
    return uniform01() < p;
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index) {
    std::uint64_t h = fnv1a64(tag);
    h = mix64(h ^ (base + 0x9E3779B97F4A7C15ULL));
    h = mix64(h ^ (index + 0xD1B54A32D192ED03ULL));
    return h;
}

}  // namespace mrpred
