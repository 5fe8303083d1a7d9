#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "folio/app/config.hpp"
#include "folio/data/panel.hpp"

namespace folio::app {

/// Long-format rows (Date, ticker, Close, signal, noise, aux, ret_lag) plus
/// the generating parameters as a JSON object.
struct SyntheticMarket {
  std::vector<data::RawPanelRow> rows;
  std::vector<std::string> features;
  std::string generator_json;
};

/// Daily returns r_{t+1} = drift + vol * (ic * s_t + sqrt(1 - ic^2) * e) with
/// standard normal signal s and noise e (for cross_sectional, s is the
/// normalized mean signal of the name's group peers). Halted days drop the
/// whole row.
SyntheticMarket generate_synthetic(const SyntheticSpec& spec);

void write_long_csv(const std::filesystem::path& path, const std::vector<data::RawPanelRow>& rows,
                    const std::vector<std::string>& features);

}  // namespace folio::app
