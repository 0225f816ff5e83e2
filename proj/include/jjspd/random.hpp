#pragma once

#include <cstdint>
#include <random>

namespace jjspd {

using Engine = std::mt19937_64;

/// SplitMix64 finaliser.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of sub-stream `stream` of `master`:
///   splitmix64(master + 0x9E3779B97F4A7C15 * (stream + 1)).
/// This rule is part of the file-format contract: changing it changes every
/// simulated output for a given seed.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream);

/// mt19937_64 seeded from stream_seed(master, stream).
Engine make_stream(std::uint64_t master, std::uint64_t stream);

/// Uniform in the open interval (0, 1).
double uniform_open(Engine& engine);

}  // namespace jjspd
