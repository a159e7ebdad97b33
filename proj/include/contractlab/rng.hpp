#pragma once

#include <cstdint>
#include <vector>

#include "contractlab/rational.hpp"

namespace contractlab {

// Counter-based pseudo-random stream (splitmix64 finalizer over a keyed
// counter). Two properties the experiments rely on:
//   * the k-th draw of stream `seed` is a pure function of (seed, k), and
//   * substream(k) yields a stream independent of the parent's position,
// so trials can be replayed or run in parallel without coordination.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : key_(mix(seed + kGamma)) {}

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in {0, ..., n-1} (rejection sampling, no modulo bias).
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
        std::uint64_t draw;
        do {
            draw = next_u64();
        } while (draw >= limit);
        return draw % n;
    }

    long next_in(long lo, long hi) {  // inclusive bounds
        return lo + static_cast<long>(next_below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    // Derived stream k: depends on (seed, k) only, not on draws made so far.
    Rng substream(std::uint64_t k) const {
        Rng child(0);
        child.key_ = mix(key_ ^ mix(k * kGamma + 0x1b873593u));
        child.counter_ = 0;
        return child;
    }

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

  private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Draws indices proportionally to exact weights. Thresholds are the exact
// floor(2^64 * cumulative weight); the per-boundary bias of < 2^-64 is far
// below anything the Monte Carlo experiments resolve, and no exactness
// claim in the library depends on sampling.
class WeightedSampler {
  public:
    explicit WeightedSampler(const std::vector<Rat>& weights) {
        thresholds_.reserve(weights.size());
        Rat cum = 0;
        Int two64 = Int(1) << 64;
        for (const Rat& w : weights) {
            cum += w;
            Int scaled = (cum.get_num() * two64) / cum.get_den();
            if (scaled >= two64) scaled = two64 - 1;
            // unsigned long is 64-bit here, so get_ui() returns the full value
            thresholds_.push_back(static_cast<std::uint64_t>(scaled.get_ui()));
        }
        if (!thresholds_.empty()) thresholds_.back() = ~std::uint64_t{0};
    }

    std::size_t draw(Rng& rng) const {
        const std::uint64_t u = rng.next_u64();
        std::size_t lo = 0, hi = thresholds_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (u <= thresholds_[mid])
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;
    }

  private:
    std::vector<std::uint64_t> thresholds_;
};

}  // namespace contractlab
