#ifndef DYNINT_RNG_HPP_
#define DYNINT_RNG_HPP_

#include <cstdint>
#include <random>

namespace dynint {

using Engine = std::mt19937_64;

// Engine for stream `stream` of a base seed. Distinct (seed, stream) pairs
// give statistically independent sequences; equal pairs give identical ones.
Engine make_engine(std::uint64_t seed, std::uint64_t stream = 0);

// Stream tags used when one seed drives several independent draws.
inline constexpr std::uint64_t kStreamGraph = 1;
inline constexpr std::uint64_t kStreamTrajectory = 2;
inline constexpr std::uint64_t kStreamAssignment = 3;
inline constexpr std::uint64_t kStreamOutcome = 4;
inline constexpr std::uint64_t kStreamEnvironment = 5;
inline constexpr std::uint64_t kStreamReplication = 1u << 20;

}  // namespace dynint

#endif  // DYNINT_RNG_HPP_
