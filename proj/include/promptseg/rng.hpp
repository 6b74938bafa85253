#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace promptseg {

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Platform-independent key for a per-sample random stream.
std::uint64_t stable_hash(std::uint64_t master_seed, std::string_view key) noexcept;

// std::mt19937_64 (bit-exact by definition) with hand-written distributions:
// the <random> distributions are not specified bit-exactly across standard
// libraries. Value type; copying forks the stream.
class SeededStream {
public:
    explicit SeededStream(std::uint64_t seed) noexcept;

    std::uint64_t next_u64() noexcept;

    // Uniform over [0, bound). bound must be > 0.
    std::uint64_t uniform_below(std::uint64_t bound) noexcept;

    // Uniform over [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept;

    // Uniform over [lo, hi) with 53-bit resolution; returns lo exactly when lo == hi.
    double uniform_real(double lo, double hi) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace promptseg
