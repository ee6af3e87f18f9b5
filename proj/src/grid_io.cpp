#include "meshfft/grid_io.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include <fmt/format.h>
#include <json.hpp>

#include "meshfft/errors.hpp"

namespace meshfft {

namespace {

constexpr const char* kLayout = "xyz-interleaved";

void put_f32(std::vector<std::uint8_t>& out, float v) {
  const auto bits = std::bit_cast<std::uint32_t>(v);
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>(bits >> shift));
}

float get_f32(const std::uint8_t* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return std::bit_cast<float>(bits);
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& raw) {
  auto p = raw;
  p += ".json";
  return p;
}

std::vector<std::uint8_t> encode_grid(const Grid3& grid) {
  const Grid3 canon = grid.canonical();
  std::vector<std::uint8_t> out;
  out.reserve(canon.values().size() * 8);
  for (const auto& v : canon.values()) {
    put_f32(out, v.real());
    put_f32(out, v.imag());
  }
  return out;
}

Grid3 decode_grid(std::span<const std::uint8_t> bytes, std::size_t n) {
  const std::size_t count = n * n * n;
  if (bytes.size() != count * 8) {
    throw FormatError(fmt::format("grid of edge {} needs {} bytes, file has {}", n, count * 8, bytes.size()));
  }
  std::vector<Complex> values(count);
  for (std::size_t i = 0; i < count; ++i) values[i] = Complex(get_f32(&bytes[8 * i]), get_f32(&bytes[8 * i + 4]));
  return Grid3(n, std::move(values));
}

std::string sidecar_json(std::size_t n) {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["precision"] = "fp32";
  j["layout"] = kLayout;
  return j.dump(2) + "\n";
}

std::size_t parse_sidecar(const std::string& json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(fmt::format("sidecar is not valid JSON: {}", e.what()));
  }
  if (!j.contains("n") || !j["n"].is_number_unsigned()) throw FormatError("sidecar missing integer 'n'");
  if (j.value("precision", "") != "fp32") throw FormatError("sidecar precision must be 'fp32'");
  if (j.value("layout", "") != kLayout) throw FormatError(fmt::format("sidecar layout must be '{}'", kLayout));
  const auto n = j["n"].get<std::size_t>();
  if (!is_power_of_two(n)) throw FormatError(fmt::format("sidecar n={} is not a power of two", n));
  return n;
}

void write_grid(const std::filesystem::path& raw, const Grid3& grid) {
  const auto bytes = encode_grid(grid);
  std::ofstream out(raw, std::ios::binary);
  if (!out) throw FormatError(fmt::format("cannot open {} for writing", raw.string()));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  std::ofstream side(sidecar_path(raw));
  if (!side) throw FormatError(fmt::format("cannot open {} for writing", sidecar_path(raw).string()));
  side << sidecar_json(grid.n());
}

Grid3 read_grid(const std::filesystem::path& raw) {
  std::ifstream side(sidecar_path(raw));
  if (!side) throw FormatError(fmt::format("missing sidecar {}", sidecar_path(raw).string()));
  const std::string json((std::istreambuf_iterator<char>(side)), std::istreambuf_iterator<char>());
  const std::size_t n = parse_sidecar(json);
  std::ifstream in(raw, std::ios::binary);
  if (!in) throw FormatError(fmt::format("cannot open {}", raw.string()));
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_grid(bytes, n);
}

}  // namespace meshfft
