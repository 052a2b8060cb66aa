#pragma once

#include <cassert>
#include <cstdint>
#include <random>
#include <vector>

namespace driftsim {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent sub-streams derived from one run seed. Keeping the workload
// stream separate from graph generation and region assignment is what makes
// root streams match across policy configurations.
namespace stream_tag {
inline constexpr uint64_t kGraph      = 0x6772617068ULL;
inline constexpr uint64_t kWorkload   = 0x776f726bULL;
inline constexpr uint64_t kPartition  = 0x70617274ULL;
inline constexpr uint64_t kFirstPhase = 0x66697273ULL;
} // namespace stream_tag

// Deterministic RNG. Wraps std::mt19937_64 (output sequence fixed by the
// standard) and supplies its own helpers because the standard library's
// distribution objects are implementation-defined.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    static uint64_t stream_seed(uint64_t seed, uint64_t tag) {
        return splitmix64(splitmix64(seed) ^ tag);
    }

    static Rng stream(uint64_t seed, uint64_t tag) {
        return Rng(stream_seed(seed, tag));
    }

    uint64_t next() { return engine_(); }

    // Uniform in [0,1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [0,n), unbiased via rejection.
    uint64_t bounded(uint64_t n) {
        assert(n > 0);
        const uint64_t threshold = (0 - n) % n;
        for (;;) {
            uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace driftsim
