#pragma once

#include <filesystem>
#include <string>

#include "folio/data/panel.hpp"

namespace folio::data {

/// A prepared panel on disk: `<dir>/panel.bin` plus `<dir>/manifest.json`.
///
/// panel.bin, little-endian:
///   char[8]   magic "FOLIOPNL"
///   uint32    format version (1)
///   uint32    reserved (0)
///   uint64    T, N, F
///   float64   z[T*N*F]        day-major, then ticker, then feature
///   float64   close[T*N]      0 where the mask is 0
///   uint8     mask[T*N]
///
/// manifest.json carries dims, dates, tickers, features, the split and an
/// optional "generator" object (ground truth for synthetic panels).
struct PanelArtifact {
  PanelTensor panel;
  SplitSpec split;
  /// Serialized JSON object, or empty.
  std::string generator_json;
};

inline constexpr std::uint32_t kPanelFormatVersion = 1;

void save_panel_artifact(const std::filesystem::path& dir, const PanelTensor& panel,
                         const SplitSpec& split, const std::string& generator_json = {});

PanelArtifact load_panel_artifact(const std::filesystem::path& dir);

std::string manifest_json(const PanelTensor& panel, const SplitSpec& split,
                          const std::string& generator_json);

}  // namespace folio::data
