#include <algorithm>

#include <fmt/format.h>

#include "meshfft/errors.hpp"
#include "meshfft/fabric.hpp"

namespace meshfft {

FabricParams FabricParams::for_precision(Precision precision, std::int64_t reconfig_delay, double clock_hz) {
  FabricParams params;
  params.cycles_per_complex = link_cycles_per_complex(precision);
  params.reconfig_delay = reconfig_delay;
  params.clock_hz = clock_hz;
  params.validate();
  return params;
}

void FabricParams::validate() const {
  if (cycles_per_complex != 1 && cycles_per_complex != 2) {
    throw InvalidArgument(fmt::format("cycles per complex must be 1 or 2, got {}", cycles_per_complex));
  }
  if (reconfig_delay < 0) throw InvalidArgument("reconfiguration delay must be non-negative");
  if (link_width_bits <= 0 || hop_latency_cycles <= 0 || !(clock_hz > 0.0)) {
    throw InvalidArgument("fabric link width, hop latency and clock must be positive");
  }
}

std::int64_t TransposePlan::elements_sent(StreamDir dir, std::size_t pe) const {
  return static_cast<std::int64_t>(sends[dir_index(dir)].at(pe).size()) * message_elements;
}

std::int64_t TransposePlan::stream_length(StreamDir dir) const {
  const auto& positions = control_positions[dir_index(dir)];
  return positions.empty() ? 0 : positions.back();
}

TransposePlan build_transpose_plan(std::size_t p, std::size_t m, const FabricParams& params, std::size_t width) {
  params.validate();
  if (p < 2 || !is_power_of_two(p)) throw InvalidArgument(fmt::format("transpose needs p >= 2 (power of two), got {}", p));
  if (m < 1 || !is_power_of_two(m)) throw InvalidArgument(fmt::format("block edge m={} must be a power of two", m));
  if (width == 0) width = m;

  TransposePlan plan;
  plan.p = p;
  plan.m = m;
  plan.width = width;
  plan.message_elements = static_cast<std::int64_t>(m * width * m);

  for (StreamDir dir : {StreamDir::kWest, StreamDir::kEast}) {
    const auto d = dir_index(dir);
    plan.sends[d].assign(p, {});
    plan.filters[d].assign(p, {});
    std::int64_t offset = 0;
    for (std::size_t turn = 0; turn + 1 < p; ++turn) {
      const std::size_t sender = dir == StreamDir::kEast ? turn : p - 1 - turn;
      plan.sender_order[d].push_back(sender);
      const std::size_t downstream = p - 1 - turn;
      for (std::size_t hop = 1; hop <= downstream; ++hop) {
        const std::size_t dest = dir == StreamDir::kEast ? sender + hop : sender - hop;
        plan.sends[d][sender].push_back({sender, dest, offset});
        plan.filters[d][dest].push_back({sender, offset, plan.message_elements});
        offset += plan.message_elements;
      }
      plan.control_positions[d].push_back(offset);
    }
  }
  check_transpose_plan(plan);
  return plan;
}

void check_transpose_plan(const TransposePlan& plan) {
  const std::size_t p = plan.p;
  if (plan.colors > kFabricColors) {
    throw InvalidArgument(fmt::format("plan needs {} colors, fabric has {}", plan.colors, kFabricColors));
  }
  for (StreamDir dir : {StreamDir::kWest, StreamDir::kEast}) {
    const auto d = dir_index(dir);
    if (plan.sends[d].size() != p || plan.filters[d].size() != p) throw InvalidArgument("plan tables sized wrong");
    for (std::size_t pe = 0; pe < p; ++pe) {
      const std::size_t expected = dir == StreamDir::kEast ? p - 1 - pe : pe;
      if (plan.sends[d][pe].size() != expected) {
        throw InvalidArgument(fmt::format("PE {} sends {} messages {}, expected {}", pe, plan.sends[d][pe].size(),
                                          dir == StreamDir::kEast ? "east" : "west", expected));
      }
      for (const auto& msg : plan.sends[d][pe]) {
        const bool downstream = dir == StreamDir::kEast ? msg.dest > pe : msg.dest < pe;
        if (msg.sender != pe || !downstream || msg.dest >= p) throw InvalidArgument("message routed against its stream");
      }
      // Windows on one stream: disjoint, one per upstream sender, each
      // matching exactly the message addressed to this PE.
      auto windows = plan.filters[d][pe];
      std::sort(windows.begin(), windows.end(),
                [](const CaptureFilter& a, const CaptureFilter& b) { return a.stream_offset < b.stream_offset; });
      for (std::size_t i = 1; i < windows.size(); ++i) {
        if (windows[i - 1].stream_offset + windows[i - 1].capture_count > windows[i].stream_offset) {
          throw InvalidArgument(fmt::format("overlapping capture windows at PE {}", pe));
        }
      }
      const std::size_t upstream = dir == StreamDir::kEast ? pe : p - 1 - pe;
      if (windows.size() != upstream) throw InvalidArgument(fmt::format("PE {} has {} capture windows, expected {}", pe, windows.size(), upstream));
      for (const auto& w : windows) {
        const auto& sent = plan.sends[d].at(w.sender);
        const bool matched = std::any_of(sent.begin(), sent.end(), [&](const Message& msg) {
          return msg.dest == pe && msg.stream_offset == w.stream_offset && w.capture_count == plan.message_elements;
        });
        if (!matched) throw InvalidArgument(fmt::format("capture window at PE {} does not match a message", pe));
      }
    }
  }
}

RowGeometry geometry_3d(MeshAxis axis, std::size_t n, std::size_t m) {
  if (axis == MeshAxis::kX) return {n, m, m, m * n, n};
  return {n, m, m, n, m * n};
}

RowGeometry geometry_2d(std::size_t n, std::size_t m) { return {n, m, 1, n, 0}; }

ElementOffsets message_offsets(const RowGeometry& g, std::size_t sender, std::size_t dest, std::int64_t t) {
  const auto ut = static_cast<std::size_t>(t);
  const std::size_t c = ut % g.m;
  const std::size_t k = (ut / g.m) % g.width;
  const std::size_t s = ut / (g.m * g.width);
  return {s * g.swap_stride + k * g.keep_stride + dest * g.m + c,
          c * g.swap_stride + k * g.keep_stride + sender * g.m + s};
}

namespace {

void require_row_shape(std::span<const std::span<Complex>> buffers, const TransposePlan& plan, const RowGeometry& g) {
  if (buffers.size() != plan.p) {
    throw InvalidArgument(fmt::format("line has {} PEs, plan expects {}", buffers.size(), plan.p));
  }
  if (g.m != plan.m || g.width != plan.width || g.n != plan.p * plan.m) {
    throw InvalidArgument("row geometry inconsistent with transpose plan");
  }
  for (const auto& b : buffers) {
    if (b.size() != g.buffer_size()) {
      throw InvalidArgument(fmt::format("PE buffer holds {} samples, expected {}", b.size(), g.buffer_size()));
    }
  }
}

}  // namespace

void execute_transpose(std::span<const std::span<Complex>> buffers, const TransposePlan& plan, const RowGeometry& geometry) {
  require_row_shape(buffers, plan, geometry);
  const std::size_t p = plan.p;
  std::vector<std::vector<Complex>> old(p);
  for (std::size_t pe = 0; pe < p; ++pe) old[pe].assign(buffers[pe].begin(), buffers[pe].end());

  auto move_message = [&](std::size_t sender, std::size_t dest) {
    for (std::int64_t t = 0; t < plan.message_elements; ++t) {
      const auto off = message_offsets(geometry, sender, dest, t);
      buffers[dest][off.dst] = old[sender][off.src];
    }
  };
  // Retained diagonal cubes, then both streams in plan order.
  for (std::size_t pe = 0; pe < p; ++pe) move_message(pe, pe);
  for (const auto& per_dir : plan.sends) {
    for (const auto& msgs : per_dir) {
      for (const auto& msg : msgs) move_message(msg.sender, msg.dest);
    }
  }
}

std::vector<std::span<Complex>> line_buffers(std::vector<PeBlock>& blocks, const MeshShape& mesh, MeshAxis axis,
                                             std::size_t line) {
  if (blocks.size() != mesh.p * mesh.p) throw InvalidArgument("block count does not match mesh");
  if (line >= mesh.p) throw InvalidArgument(fmt::format("line {} outside mesh of edge {}", line, mesh.p));
  std::vector<std::span<Complex>> out;
  out.reserve(mesh.p);
  for (std::size_t i = 0; i < mesh.p; ++i) {
    auto& block = axis == MeshAxis::kX ? blocks[i * mesh.p + line] : blocks[line * mesh.p + i];
    const PeCoord expected = axis == MeshAxis::kX ? PeCoord{i, line} : PeCoord{line, i};
    if (!(block.coord == expected)) throw InvalidArgument("blocks are not in distribute() order");
    out.emplace_back(block.data);
  }
  return out;
}

void execute_transpose(std::vector<PeBlock>& blocks, const MeshShape& mesh, MeshAxis axis, std::size_t line,
                       const TransposePlan& plan) {
  const auto buffers = line_buffers(blocks, mesh, axis, line);
  execute_transpose(buffers, plan, geometry_3d(axis, mesh.p * mesh.m, mesh.m));
}

void redistribute(std::vector<PeBlock>& blocks, const MeshShape& mesh, MeshAxis axis, const TransposePlan& plan) {
  for (std::size_t line = 0; line < mesh.p; ++line) execute_transpose(blocks, mesh, axis, line, plan);
}

}  // namespace meshfft
