#pragma once

#include <string_view>

namespace meshfft {

// Storage/transport precision of one complex sample. Arithmetic is always
// binary32; the tag selects memory footprint, link occupancy and cost model.
enum class Precision { kFp16, kFp32 };

constexpr int bytes_per_complex(Precision p) { return p == Precision::kFp16 ? 4 : 8; }

// 32-bit wavelets needed to move one complex sample over a link.
constexpr int link_cycles_per_complex(Precision p) { return p == Precision::kFp16 ? 1 : 2; }

constexpr std::string_view to_string(Precision p) { return p == Precision::kFp16 ? "fp16" : "fp32"; }

// Accepts "fp16"/"fp32" (case-sensitive). Throws InvalidArgument otherwise.
Precision parse_precision(std::string_view text);

}  // namespace meshfft
