#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hashpop {

// Stateless scrambler used to derive independent per-replication seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// mt19937_64 with hand-rolled variate transforms so that streams are
// bit-reproducible regardless of the standard library's distribution
// implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as a log argument.
    double uniform_pos() { return 1.0 - uniform01(); }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    double normal() {
        // Marsaglia polar method, cached second variate.
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    // Binomial by CDF inversion; cost is O(np), intended for small np.
    long long binomial(long long n, double p) {
        if (n <= 0 || p <= 0.0) return 0;
        if (p >= 1.0) return n;
        const double u = uniform01();
        double pmf = std::pow(1.0 - p, static_cast<double>(n));
        double cdf = pmf;
        long long k = 0;
        const double ratio = p / (1.0 - p);
        while (cdf < u && k < n) {
            pmf *= static_cast<double>(n - k) / static_cast<double>(k + 1) * ratio;
            cdf += pmf;
            ++k;
        }
        return k;
    }

    std::uint64_t next_u64() { return engine_(); }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace hashpop
