#include "levyhjb/rng.hpp"

namespace levyhjb {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

PathRng::PathRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(splitmix64(seed + kGolden) ^ (stream * 0xD1B54A32D192ED03ULL + 1))) {}

PathRng::result_type PathRng::operator()() {
    ++counter_;
    return splitmix64(key_ + counter_ * kGolden);
}

double PathRng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

} // namespace levyhjb
