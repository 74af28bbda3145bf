#ifndef DNR_RNG_HPP
#define DNR_RNG_HPP

#include <cstdint>

namespace dnr {

/// Counter-based uniform generator. Each draw is a pure function of
/// (seed, stream, step, index), so sampling order and thread assignment never
/// change the result. Streams separate independent uses within one run.
enum class Stream : std::uint64_t { Initial = 1, Vertex = 2, Edge = 3, Replicate = 4 };

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t counter_hash(std::uint64_t seed, Stream stream, std::uint64_t step, std::uint64_t index) noexcept
{
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
    h = splitmix64(h ^ step);
    return splitmix64(h ^ index);
}

/// Uniform on [0, 1) with 53 random bits.
constexpr double uniform(std::uint64_t seed, Stream stream, std::uint64_t step, std::uint64_t index) noexcept
{
    return static_cast<double>(counter_hash(seed, stream, step, index) >> 11) * 0x1.0p-53;
}

/// Seed for replicate r of a sweep started from `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t replicate) noexcept
{
    return counter_hash(seed, Stream::Replicate, 0, replicate);
}

}  // namespace dnr

#endif  // DNR_RNG_HPP
