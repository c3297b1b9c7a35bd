#pragma once

#include <cmath>
#include <cstdint>

namespace ptk {

// Deterministic splittable RNG: each (seed, stream) pair yields an
// independent xoshiro256** sequence whose state is derived by a
// splitmix64 chain. Identical (seed, stream) always reproduces the
// same draws regardless of scheduling.
inline std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t s = seed ^ (stream * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL);
        for (auto& w : st_) w = splitmix64(s);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(st_[1] * 5, 7) * 9;
        const std::uint64_t t = st_[1] << 17;
        st_[2] ^= st_[0];
        st_[3] ^= st_[1];
        st_[1] ^= st_[2];
        st_[0] ^= st_[3];
        st_[2] ^= t;
        st_[3] = rotl(st_[3], 45);
        return result;
    }

    // uniform in (0,1), never exactly 0 or 1
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = uniform(), v = uniform();
        double r = std::sqrt(-2.0 * std::log(u));
        double a = 6.283185307179586476925286766559 * v;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // uniform direction on the unit sphere in R^d, d <= 3
    void direction(int d, double* out) {
        if (d == 1) {
            out[0] = (next_u64() & 1) ? 1.0 : -1.0;
            return;
        }
        if (d == 2) {
            double a = 6.283185307179586476925286766559 * uniform();
            out[0] = std::cos(a);
            out[1] = std::sin(a);
            return;
        }
        double x, y, z, n2;
        do {
            x = normal(); y = normal(); z = normal();
            n2 = x * x + y * y + z * z;
        } while (n2 < 1e-30);
        double inv = 1.0 / std::sqrt(n2);
        out[0] = x * inv; out[1] = y * inv; out[2] = z * inv;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t st_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace ptk
