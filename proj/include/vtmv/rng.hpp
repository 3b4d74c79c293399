#pragma once

#include <cstdint>
#include <limits>

namespace vtmv {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based generator: the i-th output of stream (seed, stream) is a
/// hash of the key and i, so every path owns an independent substream and
/// results do not depend on execution order.
class PathRng {
public:
    using result_type = std::uint64_t;

    PathRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(mix64(seed ^ mix64(stream + 0x9e3779b97f4a7c15ULL))) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace vtmv
