#pragma once

#include <cstdint>
#include <cmath>
#include <utility>
#include <vector>

namespace ovdbg {

// xoshiro256** with splitmix64 seeding. Self-contained so that seeded runs
// reproduce bit-exactly regardless of the standard library in use.
class Rng
{
  public:
    explicit Rng(uint64_t seed = 1)
    {
        uint64_t z = seed;
        for (auto &word : state_) {
            z += 0x9e3779b97f4a7c15ULL;
            uint64_t s = z;
            s = (s ^ (s >> 30)) * 0xbf58476d1ce4e5b9ULL;
            s = (s ^ (s >> 27)) * 0x94d049bb133111ebULL;
            word = s ^ (s >> 31);
        }
    }

    uint64_t next_u64()
    {
        uint64_t result = rotl(state_[1] * 5, 7) * 9;
        uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform in [0, n)
    uint64_t next_below(uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    int next_int(int lo, int hi) // inclusive range
    {
        return lo + static_cast<int>(next_below(static_cast<uint64_t>(hi - lo + 1)));
    }

    // uniform in [0, 1)
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    bool next_bool(double p = 0.5) { return next_double() < p; }

    template <typename T> void shuffle(std::vector<T> &v)
    {
        for (size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[next_below(i)]);
    }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t state_[4];
};

} // namespace ovdbg
