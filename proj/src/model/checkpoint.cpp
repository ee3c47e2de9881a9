#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "gtpool/errors.hpp"
#include "gtpool/model.hpp"

namespace gtpool {
namespace {

constexpr std::array<char, 8> kMagic = {'G', 'T', 'P', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

void put_u32(std::ostream& os, std::uint32_t v) {
  v = to_little(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64(std::ostream& os, double v) {
  auto bits = to_little(std::bit_cast<std::uint64_t>(v));
  os.write(reinterpret_cast<const char*>(&bits), sizeof bits);
}

std::uint32_t get_u32(std::istream& is, const std::string& where) {
  std::uint32_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw FormatError("checkpoint truncated at " + where);
  return to_little(v);
}

double get_f64(std::istream& is, const std::string& where) {
  std::uint64_t bits = 0;
  if (!is.read(reinterpret_cast<char*>(&bits), sizeof bits)) throw FormatError("checkpoint truncated at " + where);
  return std::bit_cast<double>(to_little(bits));
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, Matrix>>& entries) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot write checkpoint " + path.string());
  os.write(kMagic.data(), kMagic.size());
  put_u32(os, kVersion);
  put_u32(os, static_cast<std::uint32_t>(entries.size()));
  for (const auto& [name, m] : entries) {
    put_u32(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u32(os, static_cast<std::uint32_t>(m.rows));
    put_u32(os, static_cast<std::uint32_t>(m.cols));
    for (double v : m.data) put_f64(os, v);
  }
  if (!os) throw Error("failed writing checkpoint " + path.string());
}

std::vector<std::pair<std::string, Matrix>> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open checkpoint " + path.string());
  std::array<char, 8> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic) throw FormatError(path.string() + ": not a checkpoint");
  const std::uint32_t version = get_u32(is, "version");
  if (version != kVersion) throw FormatError(path.string() + ": unsupported checkpoint version " + std::to_string(version));
  const std::uint32_t count = get_u32(is, "entry count");
  std::vector<std::pair<std::string, Matrix>> out;
  for (std::uint32_t e = 0; e < count; ++e) {
    const std::string where = "entry " + std::to_string(e);
    const std::uint32_t len = get_u32(is, where);
    std::string name(len, '\0');
    if (!is.read(name.data(), len)) throw FormatError("checkpoint truncated at " + where);
    const std::uint32_t rows = get_u32(is, name);
    const std::uint32_t cols = get_u32(is, name);
    Matrix m(rows, cols);
    for (double& v : m.data) v = get_f64(is, name);
    out.emplace_back(std::move(name), std::move(m));
  }
  return out;
}

void save_model(const GtPoolNet& net, const std::filesystem::path& path) {
  std::vector<std::pair<std::string, Matrix>> entries;
  for (const auto& [name, t] : net.named_parameters()) entries.emplace_back(name, t.value());
  save_checkpoint(path, entries);
}

void load_model(GtPoolNet& net, const std::filesystem::path& path) {
  std::map<std::string, Matrix> by_name;
  for (auto& [name, m] : load_checkpoint(path)) by_name.emplace(name, std::move(m));
  for (auto& [name, t] : net.named_parameters()) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw FormatError(path.string() + ": missing parameter " + name);
    Matrix& dst = t.mutable_value();
    if (!dst.same_shape(it->second)) {
      throw FormatError(path.string() + ": " + name + " is " + it->second.shape_str() + ", model expects " + dst.shape_str());
    }
    dst = it->second;
  }
}

}  // namespace gtpool
