#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace folio {

using Rng = std::mt19937_64;

/// Derives an independent generator seed for a named stream ("init",
/// "rollout", "data-gen", ...) from a single root seed.
std::uint64_t stream_seed(std::uint64_t root_seed, std::string_view stream);

inline Rng make_stream(std::uint64_t root_seed, std::string_view stream) {
  return Rng(stream_seed(root_seed, stream));
}

}  // namespace folio

namespace folio {

/// Uniform draw on the open interval (0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal via the Marsaglia polar method; the paired variate is
/// discarded so each call consumes a self-contained slice of the stream.
double standard_normal(Rng& rng);

}  // namespace folio
