#pragma once

#include <cstdint>
#include <limits>

namespace dshape {

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

/*
 * Counter-based random stream.
 *
 * A stream is identified by a master seed plus up to three integer labels
 * (typically: scheduling step, application key, iteration). Streams with
 * distinct labels are statistically independent, so results do not depend on
 * the order in which applications are updated.
 *
 * Satisfies UniformRandomBitGenerator.
 */
class Substream {
public:
    using result_type = std::uint64_t;

    explicit Substream(std::uint64_t seed) noexcept : state_(detail::splitmix64(seed)) {}

    Substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) noexcept
    {
        std::uint64_t h = detail::splitmix64(seed);
        h = detail::splitmix64(h ^ detail::splitmix64(a + 0x1000));
        h = detail::splitmix64(h ^ detail::splitmix64(b + 0x2000));
        h = detail::splitmix64(h ^ detail::splitmix64(c + 0x3000));
        state_ = h;
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Labels used to separate the streams drawn from one master seed.
namespace stream {
inline constexpr std::uint64_t arrivals = 0xA11;
inline constexpr std::uint64_t base_noise = 0xB45E;
inline constexpr std::uint64_t algorithm = 0xA190;
} // namespace stream

} // namespace dshape
