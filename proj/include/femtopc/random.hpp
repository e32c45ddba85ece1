#pragma once

#include <cstdint>
#include <random>

namespace femtopc {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v)
{
    return splitmix64(h ^ splitmix64(v + 0x632be59bd9b4e019ULL));
}

// Independent random streams within one drop.  Each consumer owns a tag so
// that adding draws to one stream never shifts another; this is what keeps
// runs of different schemes (and different femtocell densities) paired.
enum class Stream : std::uint64_t {
    MacroUsers = 1,
    Buildings = 2,
    FemtoUsers = 3,
    Shadowing = 4,
    Walls = 5,
    Fading = 6,
    FadingBank = 7,
};

inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0)
{
    const std::uint64_t h =
        hash_combine(hash_combine(seed, static_cast<std::uint64_t>(stream)), index);
    std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(stream)};
    return Rng(seq);
}

// Per-drop seed from the run's master seed.  Independent of scheme and sweep
// point so every scheme sees the same drop geometry.
constexpr std::uint64_t drop_seed(std::uint64_t master, std::uint64_t drop)
{
    return hash_combine(splitmix64(master), drop);
}

} // namespace femtopc
