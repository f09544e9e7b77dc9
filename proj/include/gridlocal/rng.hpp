#pragma once

#include <cstdint>

namespace gridlocal {

// splitmix64: tiny, fast, well-mixed 64-bit generator. Used both as a raw
// mixer and as the per-decision stream below.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t x) { return splitmix64(x); }

// A deterministic stream tied to one labeling decision: the sequence depends
// only on (seed, decision index), never on how many draws earlier decisions
// consumed. Replays therefore reproduce the exact coin flips.
class DecisionStream {
  public:
    DecisionStream(std::uint64_t seed, std::uint64_t decision_index) {
        std::uint64_t s = seed;
        const std::uint64_t a = splitmix64(s);
        s = seed ^ (0x6a09e667f3bcc909ULL + decision_index * 0x9e3779b97f4a7c15ULL);
        const std::uint64_t b = splitmix64(s);
        state_ = a ^ (b + 0x2545f4914f6cdd1dULL);
    }

    std::uint64_t next() { return splitmix64(state_); }

    // Uniform in [0, bound) via rejection sampling; exact, no modulo bias.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v = next();
        while (v >= limit) v = next();
        return v % bound;
    }

    bool coin() { return (next() & 1ULL) != 0; }

  private:
    std::uint64_t state_ = 0;
};

}  // namespace gridlocal
