#ifndef VL_RNG_HPP
#define VL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace vl {

/// Seedable generator whose output is identical on every platform.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The distribution layer is implemented here rather than with
/// <random> distributions, whose algorithms are implementation-defined:
/// uniforms take the top 53 bits, integers use rejection sampling, normals
/// use the Box-Muller transform.
class Rng {
public:
    static constexpr std::string_view algorithm = "mt19937_64/u53/box-muller";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent generator for a named substream of `seed`.
    static Rng substream(std::uint64_t seed, std::uint64_t stream) {
        return Rng(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on the closed range [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(engine_());
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return lo + static_cast<std::int64_t>(x % span);
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    static constexpr std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace vl

#endif // VL_RNG_HPP
