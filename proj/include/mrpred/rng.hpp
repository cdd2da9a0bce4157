#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace mrpred {

// Deterministic splitmix64 generator. All randomness in the library goes
// through this class so that runs are reproducible bit-for-bit everywhere;
// std::uniform_*_distribution output is implementation-defined and is not
// used anywhere.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();

    // Uniform in [0, n). Unbiased (rejection sampling); n must be > 0.
    std::uint64_t bounded(std::uint64_t n);

    // Uniform double in [0, 1), 53 bits.
    double uniform01();

    // True with probability p.
    bool coin(double p);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::uint64_t state_;
};

// Stable seed derivation. Mixes a base seed with a role tag and an index so
// that independent consumers (splits, masks, per-method generation, model
// fits) never share a stream and stay deterministic regardless of execution
// order.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index);

}  // namespace mrpred
