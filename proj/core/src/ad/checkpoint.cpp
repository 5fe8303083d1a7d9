#include "folio/ad/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "folio/error.hpp"

namespace folio::ad {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoints assume little-endian");

constexpr char kMagic[8] = {'F', 'O', 'L', 'I', 'O', 'C', 'K', 'P'};

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_doubles(std::ostream& out, std::span<const double> values) {
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  require(static_cast<bool>(in), ErrorKind::kVersion, "checkpoint is truncated");
  return v;
}

std::vector<double> get_doubles(std::istream& in, std::size_t n) {
  std::vector<double> out(n);
  in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(n * sizeof(double)));
  require(static_cast<bool>(in), ErrorKind::kVersion, "checkpoint is truncated");
  return out;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ParamStore& store,
                     const std::string& metadata) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(metadata.size()));
  out.write(metadata.data(), static_cast<std::streamsize>(metadata.size()));
  put<std::uint64_t>(out, store.step());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(store.entries().size()));
  for (const auto& e : store.entries()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(e.name.size()));
    out.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    put<std::uint32_t>(out, 2);
    put<std::uint64_t>(out, e.param.rows());
    put<std::uint64_t>(out, e.param.cols());
    put_doubles(out, e.param.data());
    put_doubles(out, e.m);
    put_doubles(out, e.v);
  }
  require(static_cast<bool>(out), ErrorKind::kIo, "failed writing checkpoint " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open checkpoint " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  require(in && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0, ErrorKind::kVersion,
          path.string() + " is not a folio checkpoint");
  const auto version = get<std::uint32_t>(in);
  require(version == kCheckpointVersion, ErrorKind::kVersion,
          "checkpoint version " + std::to_string(version) + " is not supported");

  Checkpoint ckpt;
  const auto meta_len = get<std::uint32_t>(in);
  ckpt.metadata.resize(meta_len);
  in.read(ckpt.metadata.data(), meta_len);
  ckpt.step = get<std::uint64_t>(in);
  const auto count = get<std::uint32_t>(in);
  for (std::uint32_t p = 0; p < count; ++p) {
    CheckpointArray arr;
    const auto name_len = get<std::uint32_t>(in);
    arr.name.resize(name_len);
    in.read(arr.name.data(), name_len);
    const auto rank = get<std::uint32_t>(in);
    std::size_t n = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      arr.dims.push_back(get<std::uint64_t>(in));
      n *= arr.dims.back();
    }
    arr.value = get_doubles(in, n);
    arr.adam_m = get_doubles(in, n);
    arr.adam_v = get_doubles(in, n);
    ckpt.arrays.push_back(std::move(arr));
  }
  return ckpt;
}

void restore(ParamStore& store, const Checkpoint& checkpoint) {
  auto& entries = store.entries();
  require(entries.size() == checkpoint.arrays.size(), ErrorKind::kVersion,
          "checkpoint holds " + std::to_string(checkpoint.arrays.size()) +
              " parameters, model expects " + std::to_string(entries.size()));
  for (std::size_t k = 0; k < entries.size(); ++k) {
    auto& e = entries[k];
    const auto& arr = checkpoint.arrays[k];
    require(arr.name == e.name && arr.value.size() == e.param.size(), ErrorKind::kVersion,
            "checkpoint parameter '" + arr.name + "' does not match model parameter '" + e.name +
                "'");
    std::copy(arr.value.begin(), arr.value.end(), e.param.mutable_data().begin());
    e.m = arr.adam_m;
    e.v = arr.adam_v;
  }
  store.set_step(checkpoint.step);
}

}  // namespace folio::ad
