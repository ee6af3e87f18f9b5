#include "meshfft/layout.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "meshfft/errors.hpp"

namespace meshfft {

char axis_name(Axis a) {
  switch (a) {
    case Axis::kX: return 'x';
    case Axis::kY: return 'y';
    case Axis::kZ: return 'z';
  }
  return '?';
}

bool AxisOrder::is_permutation() const {
  std::array<bool, 3> seen{};
  for (Axis a : slots) {
    const auto i = static_cast<std::size_t>(a);
    if (i > 2 || seen[i]) return false;
    seen[i] = true;
  }
  return true;
}

AxisOrder AxisOrder::swapped(std::size_t a, std::size_t b) const {
  AxisOrder out = *this;
  std::swap(out.slots.at(a), out.slots.at(b));
  return out;
}

std::size_t AxisOrder::slot_of(Axis a) const {
  for (std::size_t i = 0; i < 3; ++i) {
    if (slots[i] == a) return i;
  }
  throw InvalidArgument("axis order is not a permutation");
}

std::string AxisOrder::to_string() const {
  return {axis_name(slots[0]), axis_name(slots[1]), axis_name(slots[2])};
}

namespace {

void require_cubic_size(std::size_t n) {
  if (n < 1 || !is_power_of_two(n)) {
    throw InvalidArgument(fmt::format("grid edge {} must be a power of two (only cubic power-of-two grids are supported)", n));
  }
}

}  // namespace

Grid3::Grid3(std::size_t n, AxisOrder order) : Grid3(n, std::vector<Complex>(n * n * n), order) {}

Grid3::Grid3(std::size_t n, std::vector<Complex> values, AxisOrder order)
    : n_(n), values_(std::move(values)), order_(order) {
  require_cubic_size(n);
  if (values_.size() != n * n * n) {
    throw InvalidArgument(fmt::format("grid of edge {} needs {} values, got {}", n, n * n * n, values_.size()));
  }
  if (!order_.is_permutation()) throw InvalidArgument("axis order must be a permutation of x, y, z");
}

std::size_t Grid3::storage_index(std::size_t x, std::size_t y, std::size_t z) const {
  const std::array<std::size_t, 3> logical{x, y, z};
  const auto s0 = logical[static_cast<std::size_t>(order_.slots[0])];
  const auto s1 = logical[static_cast<std::size_t>(order_.slots[1])];
  const auto s2 = logical[static_cast<std::size_t>(order_.slots[2])];
  return (s0 * n_ + s1) * n_ + s2;
}

const Complex& Grid3::at(std::size_t x, std::size_t y, std::size_t z) const { return values_[storage_index(x, y, z)]; }

Complex& Grid3::at(std::size_t x, std::size_t y, std::size_t z) { return values_[storage_index(x, y, z)]; }

Grid3 Grid3::canonical() const {
  if (order_.is_canonical()) return *this;
  Grid3 out(n_);
  for (std::size_t x = 0; x < n_; ++x)
    for (std::size_t y = 0; y < n_; ++y)
      for (std::size_t z = 0; z < n_; ++z) out.at_storage(x, y, z) = at(x, y, z);
  return out;
}

Grid2::Grid2(std::size_t n) : Grid2(n, std::vector<Complex>(n * n)) {}

Grid2::Grid2(std::size_t n, std::vector<Complex> values) : n_(n), values_(std::move(values)) {
  require_cubic_size(n);
  if (values_.size() != n * n) {
    throw InvalidArgument(fmt::format("2D grid of edge {} needs {} values, got {}", n, n * n, values_.size()));
  }
}

Grid2 Grid2::canonical() const {
  if (!transposed_) return *this;
  Grid2 out(n_);
  for (std::size_t u = 0; u < n_; ++u)
    for (std::size_t v = 0; v < n_; ++v) out.at(u, v) = at(u, v);
  return out;
}

MeshShape MeshShape::for_problem(std::size_t n, std::size_t p) {
  if (!is_power_of_two(n) || !is_power_of_two(p)) {
    throw InvalidArgument(fmt::format("n={} and p={} must both be powers of two", n, p));
  }
  if (p > n || n % p != 0) {
    throw InvalidArgument(fmt::format("mesh edge p={} does not divide n={}", p, n));
  }
  return MeshShape{p, n / p};
}

std::vector<PeBlock> distribute(const Grid3& grid, const MeshShape& mesh) {
  const std::size_t n = grid.n();
  if (mesh.p * mesh.m != n) {
    throw InvalidArgument(fmt::format("mesh {}x{} with m={} does not cover n={}", mesh.p, mesh.p, mesh.m, n));
  }
  std::vector<PeBlock> blocks;
  blocks.reserve(mesh.p * mesh.p);
  for (std::size_t x = 0; x < mesh.p; ++x) {
    for (std::size_t y = 0; y < mesh.p; ++y) {
      PeBlock block{{x, y}, mesh.m, n, std::vector<Complex>(mesh.m * mesh.m * n)};
      for (std::size_t a = 0; a < mesh.m; ++a) {
        for (std::size_t b = 0; b < mesh.m; ++b) {
          const Complex* src = &grid.at_storage(x * mesh.m + a, y * mesh.m + b, 0);
          std::copy_n(src, n, block.pencil(a * mesh.m + b).begin());
        }
      }
      blocks.push_back(std::move(block));
    }
  }
  return blocks;
}

Grid3 gather(std::span<const PeBlock> blocks, const MeshShape& mesh, AxisOrder order) {
  if (blocks.empty()) throw InvalidArgument("gather: no blocks");
  const std::size_t n = mesh.p * mesh.m;
  Grid3 grid(n, order);
  std::vector<bool> seen(mesh.p * mesh.p, false);
  for (const auto& block : blocks) {
    if (block.coord.x >= mesh.p || block.coord.y >= mesh.p) {
      throw InvalidArgument(fmt::format("gather: block ({}, {}) outside {}x{} mesh", block.coord.x, block.coord.y, mesh.p, mesh.p));
    }
    if (block.m != mesh.m || block.n != n || block.data.size() != mesh.m * mesh.m * n) {
      throw InvalidArgument("gather: block shape inconsistent with mesh");
    }
    const std::size_t slot = block.coord.x * mesh.p + block.coord.y;
    if (seen[slot]) {
      throw InvalidArgument(fmt::format("gather: duplicate block at ({}, {})", block.coord.x, block.coord.y));
    }
    seen[slot] = true;
    for (std::size_t a = 0; a < mesh.m; ++a) {
      for (std::size_t b = 0; b < mesh.m; ++b) {
        const auto src = block.pencil(a * mesh.m + b);
        std::copy(src.begin(), src.end(), &grid.at_storage(block.coord.x * mesh.m + a, block.coord.y * mesh.m + b, 0));
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw InvalidArgument("gather: blocks do not cover the mesh");
  }
  return grid;
}

Feasibility memory_feasible(std::size_t n, std::size_t m, Precision precision) {
  Feasibility f;
  f.bytes_required = m * m * n * static_cast<std::size_t>(bytes_per_complex(precision)) * MemoryModel::kCopies;
  f.feasible = f.bytes_required <= f.bytes_available;
  return f;
}

std::uint64_t wafer_bytes(std::size_t n, Precision precision) {
  const std::uint64_t n64 = n;
  return n64 * n64 * n64 * static_cast<std::uint64_t>(bytes_per_complex(precision)) * MemoryModel::kCopies;
}

std::size_t largest_wafer_problem(Precision precision, std::size_t pe_count) {
  const std::uint64_t capacity = static_cast<std::uint64_t>(pe_count) * MemoryModel::kBytesPerPe;
  std::size_t n = 1;
  while (wafer_bytes(n * 2, precision) <= capacity) n *= 2;
  return n;
}

}  // namespace meshfft
