#pragma once

#include <cstdint>
#include <limits>

namespace protpat {

/// SplitMix64 bit generator. Cheap to seed, which matters because every
/// pattern, repetition and permutation gets its own stream.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t state = 0) noexcept : state_(state) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

using Rng = SplitMix64;

namespace detail {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    return z ^ (z >> 33);
}

}  // namespace detail

/// Independent stream number `index` of `seed`. Depends only on the pair, so
/// results are identical whatever order or thread evaluates the index.
constexpr Rng derive_stream(std::uint64_t seed, std::uint64_t index) noexcept
{
    return Rng(detail::mix64(detail::mix64(seed) ^ detail::mix64(index + 0x632be59bd9b4e019ULL)));
}

/// Seed for a named sub-purpose of `seed` (e.g. "generation" vs "permutation").
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept
{
    return detail::mix64(seed + 0x9e3779b97f4a7c15ULL * (tag + 1));
}

/// Uniform double in the open interval (0, 1).
template <typename Gen>
double uniform_open01(Gen& gen)
{
    // 53 random bits, offset by half an ulp so neither endpoint is produced.
    return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

/// Uniform integer in [0, n) for n >= 1 (Lemire's multiply-shift with rejection).
template <typename Gen>
std::uint64_t uniform_below(Gen& gen, std::uint64_t n)
{
    unsigned __int128 m = static_cast<unsigned __int128>(gen()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(gen()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace protpat
