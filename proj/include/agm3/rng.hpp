#ifndef AGM3_RNG_HPP
#define AGM3_RNG_HPP

#include <complex>
#include <cstdint>

namespace agm3 {

/// splitmix64: tiny, portable, and identical on every platform. We avoid
/// std::uniform_real_distribution because its output is
/// implementation-defined and would break report determinism.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// uniform in [0,1)
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// uniform in [-1,1]
    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

    std::complex<double> next_complex() { return {next_symmetric(), next_symmetric()}; }

    /// point on the unit circle
    std::complex<double> next_phase() {
        double t = 6.283185307179586476925286766559 * next_unit();
        return {std::cos(t), std::sin(t)};
    }

    /// derive an independent stream (for parallel-safe deterministic fanout)
    Rng fork(std::uint64_t salt) {
        std::uint64_t s = next_u64() ^ (salt * 0x9e3779b97f4a7c15ull + 0x853c49e6748fea9bull);
        return Rng(s);
    }

private:
    std::uint64_t state_;
};

}  // namespace agm3

#endif
