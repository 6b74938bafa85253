#include "promptseg/rng.hpp"

namespace promptseg {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stable_hash(std::uint64_t master_seed, std::string_view key) noexcept {
    // FNV-1a over the key bytes, then folded with the seed.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : key) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return mix64(mix64(master_seed) ^ h);
}

SeededStream::SeededStream(std::uint64_t seed) noexcept : seed_(seed), engine_(mix64(seed)) {}

std::uint64_t SeededStream::next_u64() noexcept { return engine_(); }

std::uint64_t SeededStream::uniform_below(std::uint64_t bound) noexcept {
    // Rejection sampling on the top of the range removes modulo bias.
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % bound + 1) % bound;
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r <= limit) return r % bound;
    }
}

std::int64_t SeededStream::uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
    if (hi <= lo) return lo;
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(uniform_below(span));
}

double SeededStream::uniform_real(double lo, double hi) noexcept {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

}  // namespace promptseg
