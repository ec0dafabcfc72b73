#pragma once

#include <cstdint>
#include <limits>

namespace levyhjb {

/// Counter-based generator: output n of stream (seed, stream) is splitmix64 of a derived key,
/// so each path owns an independent, order-free stream.
class PathRng {
public:
    using result_type = std::uint64_t;

    PathRng(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

    /// uniform on [0, 1)
    double uniform();
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

} // namespace levyhjb
