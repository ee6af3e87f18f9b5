#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "meshfft/numerics.hpp"
#include "meshfft/precision.hpp"

namespace meshfft {

enum class Axis : std::uint8_t { kX, kY, kZ };

char axis_name(Axis a);

// Which logical axis occupies each storage slot. Slot 0 is mapped onto the
// mesh x dimension, slot 1 onto mesh y, slot 2 is the in-memory pencil axis.
struct AxisOrder {
  std::array<Axis, 3> slots{Axis::kX, Axis::kY, Axis::kZ};

  static AxisOrder canonical() { return {}; }
  bool is_canonical() const { return slots == AxisOrder{}.slots; }
  bool is_permutation() const;
  AxisOrder swapped(std::size_t a, std::size_t b) const;
  std::size_t slot_of(Axis a) const;
  std::string to_string() const;  // e.g. "zxy"

  bool operator==(const AxisOrder&) const = default;
};

// n³ samples stored slot-major: index (s0·n + s1)·n + s2, where the slots
// carry the logical axes named by `order`.
class Grid3 {
 public:
  Grid3() = default;
  explicit Grid3(std::size_t n, AxisOrder order = AxisOrder::canonical());
  Grid3(std::size_t n, std::vector<Complex> values, AxisOrder order = AxisOrder::canonical());

  std::size_t n() const { return n_; }
  const AxisOrder& order() const { return order_; }
  std::span<Complex> values() { return values_; }
  std::span<const Complex> values() const { return values_; }

  Complex& at_storage(std::size_t s0, std::size_t s1, std::size_t s2) { return values_[(s0 * n_ + s1) * n_ + s2]; }
  const Complex& at_storage(std::size_t s0, std::size_t s1, std::size_t s2) const {
    return values_[(s0 * n_ + s1) * n_ + s2];
  }

  // Access by logical coordinates regardless of the current orientation.
  const Complex& at(std::size_t x, std::size_t y, std::size_t z) const;
  Complex& at(std::size_t x, std::size_t y, std::size_t z);

  // Copy reoriented to canonical (x, y, z) storage.
  Grid3 canonical() const;

  bool operator==(const Grid3&) const = default;

 private:
  std::size_t storage_index(std::size_t x, std::size_t y, std::size_t z) const;

  std::size_t n_ = 0;
  std::vector<Complex> values_;
  AxisOrder order_;
};

// n×n samples for the 2D transform, distributed over one row of PEs.
// Storage index s0·n + s1: slot 0 is the PE axis, slot 1 the memory axis.
// Logical a(u, v) has u on the PE axis initially; `transposed` flips that.
class Grid2 {
 public:
  Grid2() = default;
  explicit Grid2(std::size_t n);
  Grid2(std::size_t n, std::vector<Complex> values);

  std::size_t n() const { return n_; }
  bool transposed() const { return transposed_; }
  void set_transposed(bool t) { transposed_ = t; }
  std::span<Complex> values() { return values_; }
  std::span<const Complex> values() const { return values_; }

  const Complex& at(std::size_t u, std::size_t v) const {
    return transposed_ ? values_[v * n_ + u] : values_[u * n_ + v];
  }
  Complex& at(std::size_t u, std::size_t v) { return transposed_ ? values_[v * n_ + u] : values_[u * n_ + v]; }

  Grid2 canonical() const;

 private:
  std::size_t n_ = 0;
  std::vector<Complex> values_;
  bool transposed_ = false;
};

struct MeshShape {
  std::size_t p = 1;  // PEs per mesh edge
  std::size_t m = 1;  // pencils per PE edge, n / p

  // Validates that n and p are powers of two and p divides n.
  static MeshShape for_problem(std::size_t n, std::size_t p);
};

struct PeCoord {
  std::size_t x = 0;
  std::size_t y = 0;
  bool operator==(const PeCoord&) const = default;
};

// The m² pencils resident on one PE, pencil-major, ordered row-major by
// (local slot-0 index, local slot-1 index).
struct PeBlock {
  PeCoord coord;
  std::size_t m = 1;
  std::size_t n = 0;
  std::vector<Complex> data;  // m·m·n samples

  std::size_t pencil_count() const { return m * m; }
  std::span<Complex> pencil(std::size_t k) { return std::span<Complex>(data).subspan(k * n, n); }
  std::span<const Complex> pencil(std::size_t k) const { return std::span<const Complex>(data).subspan(k * n, n); }
};

// Blocks come back ordered by (x, y) row-major: index x·p + y.
std::vector<PeBlock> distribute(const Grid3& grid, const MeshShape& mesh);

Grid3 gather(std::span<const PeBlock> blocks, const MeshShape& mesh, AxisOrder order = AxisOrder::canonical());

struct MemoryModel {
  static constexpr std::size_t kBytesPerPe = 48 * 1024;
  static constexpr std::size_t kCopies = 2;
  static constexpr std::size_t kWaferPes = 850'000;
};

struct Feasibility {
  bool feasible = false;
  std::size_t bytes_required = 0;
  std::size_t bytes_available = MemoryModel::kBytesPerPe;
};

Feasibility memory_feasible(std::size_t n, std::size_t m, Precision precision);

// Bytes for an out-of-place n³ transform across the whole wafer.
std::uint64_t wafer_bytes(std::size_t n, Precision precision);

// Largest power-of-two n whose n³ out-of-place footprint fits in the
// aggregate PE memory of `pe_count` PEs.
std::size_t largest_wafer_problem(Precision precision, std::size_t pe_count = MemoryModel::kWaferPes);

}  // namespace meshfft
