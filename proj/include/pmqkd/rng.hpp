#ifndef PMQKD_RNG_HPP
#define PMQKD_RNG_HPP

#include <cstdint>

namespace pmqkd {

/// Counter-based stream built on the splitmix64 finalizer: output i of
/// stream s is mix(key(seed, s) + (i+1) * GAMMA). Streams are independent
/// of thread layout, so batch-parallel runs are bit-reproducible.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(seed ^ mix(stream + 0x9E3779B97F4A7C15ull))) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t next() { return mix(key_ + ++counter_ * 0x9E3779B97F4A7C15ull); }

    /// Uniform double in [0, 1), 53 bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace pmqkd

#endif
