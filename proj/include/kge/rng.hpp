#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace kge {

// Deterministic RNG wrapper. All sampling goes through hand-rolled
// distributions so results do not depend on libstdc++ internals; a run is
// reproducible from its seed on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n); n must be > 0
    std::uint64_t uniform_int(std::uint64_t n) { return gen_() % n; }

    bool coin() { return (gen_() & 1u) != 0; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace kge
