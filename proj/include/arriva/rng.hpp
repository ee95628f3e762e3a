#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace arriva {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// xoshiro256** with self-contained samplers. The standard library
/// distributions are implementation-defined, which would break the
/// byte-identical-rerun guarantee, so sampling is done here.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = detail::splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1); never returns exactly 0.
    double uniform_open() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        // Lemire-style rejection keeps the draw unbiased.
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t threshold = (0ULL - n) % n;
            while (lo < threshold) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Standard normal via polar Box-Muller with a one-deep cache.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    double normal(double mu, double sd) { return mu + sd * normal(); }

    double exponential(double rate = 1.0) { return -std::log(uniform_open()) / rate; }

    /// Gamma(shape, scale) via Marsaglia-Tsang, boosted for shape < 1.
    double gamma(double shape, double scale) {
        if (shape < 1.0) {
            const double u = uniform_open();
            return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_open();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
        }
    }

    /// Poisson: inversion for small means, PTRS transformed rejection above.
    long long poisson(double mu) {
        if (mu <= 0.0) return 0;
        if (mu < 30.0) {
            const double l = std::exp(-mu);
            long long k = 0;
            double p = uniform_open();
            while (p > l) {
                p *= uniform_open();
                ++k;
            }
            return k;
        }
        // PTRS (Hörmann 1993).
        const double smu = std::sqrt(mu);
        const double b = 0.931 + 2.53 * smu;
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double vr = 0.9277 - 3.6224 / (b - 2.0);
        for (;;) {
            const double u = uniform() - 0.5;
            const double v = uniform_open();
            const double us = 0.5 - std::abs(u);
            const double k = std::floor((2.0 * a / us + b) * u + mu + 0.43);
            if (us >= 0.07 && v <= vr) return static_cast<long long>(k);
            if (k < 0.0 || (us < 0.013 && v > us)) continue;
            if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
                k * std::log(mu) - mu - std::lgamma(k + 1.0))
                return static_cast<long long>(k);
        }
    }

    /// Negative binomial with mean mu and variance mu(1 + alpha mu),
    /// drawn as the gamma-Poisson mixture.
    long long negbin(double mu, double alpha) {
        if (alpha <= 0.0) return poisson(mu);
        const double shape = 1.0 / alpha;
        return poisson(gamma(shape, alpha * mu));
    }

    /// Geometric block length with the given mean (support 1, 2, ...).
    long long geometric_length(double mean_length) {
        if (mean_length <= 1.0) return 1;
        const double p = 1.0 / mean_length;
        return 1 + static_cast<long long>(std::floor(std::log(uniform_open()) / std::log1p(-p)));
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4]{};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Stable seed derivation: the (run seed, producer, origin) triple maps to one
/// stream regardless of execution order, which is what makes parallel and
/// serial runs byte-identical.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::int64_t index = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ base;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    h ^= static_cast<std::uint64_t>(index) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    std::uint64_t sm = h;
    return detail::splitmix64(sm);
}

}  // namespace arriva
