#include "elf/random.hpp"

namespace elf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const char c : text) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t master_seed, std::string_view name) {
    return splitmix64(splitmix64(master_seed) ^ fnv1a(name));
}

Rng make_stream(std::uint64_t master_seed, std::string_view name) {
    return Rng{stream_seed(master_seed, name)};
}

Rng split(Rng& parent) { return Rng{splitmix64(parent())}; }

}  // namespace elf
