#include "abctk/random.hpp"

#include <array>

namespace abctk {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Rng make_stream(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t state = master_seed ^ splitmix64(index);
    std::array<std::uint32_t, 16> words{};
    for (std::size_t i = 0; i < words.size(); i += 2) {
        const std::uint64_t w = splitmix64(state);
        words[i] = static_cast<std::uint32_t>(w);
        words[i + 1] = static_cast<std::uint32_t>(w >> 32);
    }
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

std::uint64_t entropy_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace abctk
