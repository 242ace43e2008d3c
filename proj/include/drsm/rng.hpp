#pragma once
// Deterministic random streams.
//
// std::mt19937_64 has a standard-mandated output sequence, but the standard
// <random> distributions are implementation-defined, so all conversions
// (uniform doubles, bounded indices, normals) are hand-rolled here. Seeded
// runs are therefore bit-identical across compilers and platforms, which the
// reproducibility guarantees of the CLI depend on.

#include <cassert>
#include <cmath>
#include <cstdint>
#include <random>

namespace drsm {

/// One splitmix64 step; advances state and returns a mixed 64-bit value.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for an independent stream identified by (master, stream_id).
/// Distinct stream ids give well-separated generator states, so components
/// that draw from different streams never perturb each other's sequences.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id) {
    std::uint64_t s = master ^ (0xd1342543de82ef95ULL * (stream_id + 1));
    std::uint64_t out = splitmix64(s);
    return out ^ splitmix64(s);
}

/// Deterministic generator wrapping std::mt19937_64.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    /// Independent stream derived from a master seed and a stream id.
    static Rng stream(std::uint64_t master, std::uint64_t stream_id) {
        return Rng(derive_seed(master, stream_id));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    bool bernoulli(double p) { return next_double() < p; }

    /// Uniform on {0, ..., n-1}, unbiased (rejection below 2^64 mod n).
    std::size_t next_index(std::size_t n) {
        assert(n > 0);
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t reject_below = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= reject_below) return static_cast<std::size_t>(r % bound);
        }
    }

    /// Standard normal via Box-Muller; caches the second variate.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        do {
            u = next_double();
        } while (u <= 0.0);
        const double v = next_double();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 6.283185307179586476925286766559 * v;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace drsm
