#include "gea/rng.hpp"

#include <limits>

#include "gea/errors.hpp"

namespace gea {

std::size_t Rng::uniform_index(std::size_t n) {
    if (n == 0) throw InvalidArgument("uniform_index: empty range");
    const std::uint64_t range = static_cast<std::uint64_t>(n);
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - (max % range + 1) % range;
    std::uint64_t draw = next();
    while (draw > limit) draw = next();
    return static_cast<std::size_t>(draw % range);
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t iteration,
                          std::uint64_t agent, std::uint64_t stream) {
    return mix64(mix64(mix64(mix64(run_seed) ^ iteration) ^ agent) ^ stream);
}

}  // namespace gea
