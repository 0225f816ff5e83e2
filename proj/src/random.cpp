#include "jjspd/random.hpp"

namespace jjspd {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master + 0x9E3779B97F4A7C15ull * (stream + 1));
}

Engine make_stream(std::uint64_t master, std::uint64_t stream) {
  return Engine(stream_seed(master, stream));
}

double uniform_open(Engine& engine) {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace jjspd
