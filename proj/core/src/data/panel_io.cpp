#include "folio/data/panel_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "folio/error.hpp"
#include "json.hpp"

namespace folio::data {
namespace {

static_assert(std::endian::native == std::endian::little, "panel.bin assumes little-endian");

constexpr char kMagic[8] = {'F', 'O', 'L', 'I', 'O', 'P', 'N', 'L'};

template <typename T>
void put(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  require(static_cast<bool>(in), ErrorKind::kIo, "truncated panel.bin");
  return value;
}

nlohmann::json range_json(const DayRange& r, const PanelTensor& panel) {
  return {{"first", r.first},
          {"last", r.last},
          {"from", panel.dates[r.first].iso()},
          {"to", panel.dates[r.last].iso()}};
}

DayRange range_from_json(const nlohmann::json& j) {
  return DayRange{j.at("first").get<std::size_t>(), j.at("last").get<std::size_t>()};
}

}  // namespace

std::string manifest_json(const PanelTensor& panel, const SplitSpec& split,
                          const std::string& generator_json) {
  nlohmann::json j;
  j["format_version"] = kPanelFormatVersion;
  j["dims"] = {{"T", panel.num_days()}, {"N", panel.num_assets()}, {"F", panel.num_features()}};
  std::vector<std::string> dates;
  dates.reserve(panel.dates.size());
  for (const auto& d : panel.dates) dates.push_back(d.iso());
  j["dates"] = dates;
  j["tickers"] = panel.tickers;
  j["features"] = panel.features;
  nlohmann::json s;
  s["mode"] = to_string(split.mode);
  s["embargo_days"] = split.embargo_days;
  s["train"] = range_json(split.train, panel);
  if (split.validation) s["validation"] = range_json(*split.validation, panel);
  s["test"] = range_json(split.test, panel);
  j["split"] = s;
  if (!generator_json.empty()) j["generator"] = nlohmann::json::parse(generator_json);
  return j.dump(2) + "\n";
}

void save_panel_artifact(const std::filesystem::path& dir, const PanelTensor& panel,
                         const SplitSpec& split, const std::string& generator_json) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "panel.bin", std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + (dir / "panel.bin").string());
    out.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, kPanelFormatVersion);
    put<std::uint32_t>(out, 0);
    put<std::uint64_t>(out, panel.num_days());
    put<std::uint64_t>(out, panel.num_assets());
    put<std::uint64_t>(out, panel.num_features());
    for (double v : panel.z) put<double>(out, is_missing(v) ? 0.0 : v);
    for (std::size_t k = 0; k < panel.raw_close.size(); ++k) {
      put<double>(out, panel.mask[k] ? panel.raw_close[k] : 0.0);
    }
    out.write(reinterpret_cast<const char*>(panel.mask.data()),
              static_cast<std::streamsize>(panel.mask.size()));
    require(static_cast<bool>(out), ErrorKind::kIo, "failed writing panel.bin");
  }
  std::ofstream manifest(dir / "manifest.json", std::ios::trunc);
  require(static_cast<bool>(manifest), ErrorKind::kIo,
          "cannot write " + (dir / "manifest.json").string());
  manifest << manifest_json(panel, split, generator_json);
}

PanelArtifact load_panel_artifact(const std::filesystem::path& dir) {
  std::ifstream manifest_in(dir / "manifest.json");
  require(static_cast<bool>(manifest_in), ErrorKind::kIo,
          "cannot open " + (dir / "manifest.json").string());
  nlohmann::json j;
  try {
    manifest_in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kIo, "malformed manifest.json: " + std::string(e.what()));
  }

  PanelArtifact artifact;
  PanelTensor& panel = artifact.panel;
  for (const auto& d : j.at("dates")) {
    const auto parsed = parse_date(d.get<std::string>());
    require(parsed.has_value(), ErrorKind::kIo, "manifest holds an invalid date");
    panel.dates.push_back(*parsed);
  }
  panel.tickers = j.at("tickers").get<std::vector<std::string>>();
  panel.features = j.at("features").get<std::vector<std::string>>();

  const auto& s = j.at("split");
  artifact.split.mode = parse_split_mode(s.at("mode").get<std::string>());
  artifact.split.embargo_days = s.at("embargo_days").get<std::size_t>();
  artifact.split.train = range_from_json(s.at("train"));
  if (s.contains("validation")) artifact.split.validation = range_from_json(s.at("validation"));
  artifact.split.test = range_from_json(s.at("test"));
  if (j.contains("generator")) artifact.generator_json = j.at("generator").dump();

  std::ifstream in(dir / "panel.bin", std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open " + (dir / "panel.bin").string());
  char magic[8];
  in.read(magic, sizeof(magic));
  require(in && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0, ErrorKind::kIo,
          "panel.bin has a bad magic header");
  const auto version = get<std::uint32_t>(in);
  require(version == kPanelFormatVersion, ErrorKind::kVersion,
          "panel.bin version " + std::to_string(version) + " is not supported");
  get<std::uint32_t>(in);
  const auto T = get<std::uint64_t>(in);
  const auto N = get<std::uint64_t>(in);
  const auto F = get<std::uint64_t>(in);
  require(T == panel.num_days() && N == panel.num_assets() && F == panel.num_features(),
          ErrorKind::kIo, "panel.bin dims disagree with manifest.json");

  panel.z.resize(T * N * F);
  in.read(reinterpret_cast<char*>(panel.z.data()), static_cast<std::streamsize>(T * N * F * 8));
  panel.raw_close.resize(T * N);
  in.read(reinterpret_cast<char*>(panel.raw_close.data()), static_cast<std::streamsize>(T * N * 8));
  panel.mask.resize(T * N);
  in.read(reinterpret_cast<char*>(panel.mask.data()), static_cast<std::streamsize>(T * N));
  require(static_cast<bool>(in), ErrorKind::kIo, "truncated panel.bin");

  for (std::size_t k = 0; k < panel.raw_close.size(); ++k) {
    if (!panel.mask[k]) panel.raw_close[k] = kMissing;
  }
  if (T >= 2) {
    panel.simple_returns = compute_returns(panel.close_matrix()).simple_returns.data();
  } else {
    panel.simple_returns.assign(T * N, kMissing);
  }
  return artifact;
}

}  // namespace folio::data
