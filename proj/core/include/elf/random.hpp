#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace elf {

using Rng = std::mt19937_64;

/// Seed of the named sub-stream `name` derived from `master_seed`.
///
/// The derivation is a stable FNV-1a hash of the name mixed with the master
/// seed through splitmix64, so adding a new stream never shifts the values
/// drawn by existing ones.
[[nodiscard]] std::uint64_t stream_seed(std::uint64_t master_seed, std::string_view name);

[[nodiscard]] Rng make_stream(std::uint64_t master_seed, std::string_view name);

/// Child generator seeded by one draw of `parent`.
[[nodiscard]] Rng split(Rng& parent);

}  // namespace elf
