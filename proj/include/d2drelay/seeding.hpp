#pragma once

#include <cstdint>

namespace d2drelay {

// Named sub-streams split off a master seed. Each consumer draws from its own
// stream so that, e.g., user positions never shift when the occupation draw
// changes.
enum class SeedStream : std::uint64_t {
    street = 1,
    users = 2,
    occupation = 3,
    bootstrap = 4,
    user_edge = 5,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic child seed for (master, stream, index).
constexpr std::uint64_t derive_seed(std::uint64_t master, SeedStream stream,
                                    std::uint64_t index = 0) noexcept {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
    return splitmix64(h ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

}  // namespace d2drelay
