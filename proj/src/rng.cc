#include "dynint/rng.hpp"

#include <array>

namespace dynint {

Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
  const std::array<std::uint32_t, 5> words = {
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(stream),
      static_cast<std::uint32_t>(stream >> 32), 0x5eed5eedu};
  std::seed_seq seq(words.begin(), words.end());
  return Engine(seq);
}

}  // namespace dynint
