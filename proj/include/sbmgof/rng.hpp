#pragma once

#include <cstdint>

// Counter-based seeded randomness. Every consumer derives its own stream key
// from (seed, tag, indices...) so results never depend on evaluation order or
// thread scheduling.
namespace sbmgof::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer
constexpr std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t a) {
    return mix(key + kGolden * (a + 1));
}

constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t a, std::uint64_t b) {
    return derive(derive(key, a), b);
}

constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t a, std::uint64_t b,
                               std::uint64_t c) {
    return derive(derive(key, a, b), c);
}

constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t a, std::uint64_t b,
                               std::uint64_t c, std::uint64_t d) {
    return derive(derive(key, a, b, c), d);
}

// Stream tags used for seed fan-out across the library. Keeping them in one
// place guarantees two consumers never collide on a derived key.
enum Tag : std::uint64_t {
    kTagSbmPair = 1,    // per-pair edge draws in SBM generation
    kTagAugmentPair = 2,// per-pair edge draws for augmentation edges
    kTagPsiCell = 3,    // per-(m,v) index draws in psi sampling
    kTagSpectral = 4,   // eigensolver init + k-means seeding
    kTagBootstrap = 5,  // per-replicate bootstrap generation/sampling
    kTagAugment = 6,    // augmentation edge seed fan-out
    kTagPsi = 7,        // psi seed fan-out in test drivers
    kTagSimReplicate = 8, // per-replicate seeds in the simulation harness
    kTagKmeans = 9,     // k-means restarts
    kTagEigenInit = 10, // subspace iteration start block
};

// Counter-based generator: output i is mix(key + i*golden). State is a plain
// counter, so skipping ahead and replaying are trivial.
class Stream {
public:
    explicit Stream(std::uint64_t key) : state_(key) {}

    std::uint64_t next_u64() {
        state_ += kGolden;
        return mix(state_);
    }

    // uniform in [0, 1)
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // exactly uniform over [0, n), n >= 1, by modulo rejection
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

private:
    std::uint64_t state_;
};

// One uniform draw addressed by key alone; used for per-pair Bernoulli edges.
inline double unit_at(std::uint64_t key) {
    return static_cast<double>(mix(key + kGolden) >> 11) * 0x1.0p-53;
}

} // namespace sbmgof::rng
