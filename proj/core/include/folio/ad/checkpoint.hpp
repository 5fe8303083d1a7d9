#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "folio/ad/param_store.hpp"

namespace folio::ad {

/// Checkpoint file, little-endian:
///
///   char[8]  magic "FOLIOCKP"
///   uint32   format version (1)
///   uint32   metadata byte count M
///   char[M]  metadata (UTF-8 JSON chosen by the caller)
///   uint64   optimizer step
///   uint32   parameter count P
///   P times:
///     uint32   name byte count, then the name
///     uint32   rank R, then uint64 dims[R]
///     float64  value[n], adam_m[n], adam_v[n]   with n = prod(dims)
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointArray {
  std::string name;
  std::vector<std::uint64_t> dims;
  std::vector<double> value;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
};

struct Checkpoint {
  std::string metadata;
  std::uint64_t step = 0;
  std::vector<CheckpointArray> arrays;
};

void save_checkpoint(const std::filesystem::path& path, const ParamStore& store,
                     const std::string& metadata);

Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Copies a checkpoint into a store with the same names and shapes; throws
/// kVersion on any mismatch.
void restore(ParamStore& store, const Checkpoint& checkpoint);

}  // namespace folio::ad
