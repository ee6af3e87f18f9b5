#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "meshfft/layout.hpp"

namespace meshfft {

// Raw grid file: little-endian binary32 (re, im) pairs, x slowest and z
// fastest. A sidecar at `<path>.json` carries
//   {"n": <int>, "precision": "fp32", "layout": "xyz-interleaved"}.
std::filesystem::path sidecar_path(const std::filesystem::path& raw);

std::vector<std::uint8_t> encode_grid(const Grid3& grid);
Grid3 decode_grid(std::span<const std::uint8_t> bytes, std::size_t n);

std::string sidecar_json(std::size_t n);
std::size_t parse_sidecar(const std::string& json);

// Writes both files. Non-canonical grids are reoriented first.
void write_grid(const std::filesystem::path& raw, const Grid3& grid);
Grid3 read_grid(const std::filesystem::path& raw);

}  // namespace meshfft
