#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "meshfft/layout.hpp"
#include "meshfft/numerics.hpp"
#include "meshfft/precision.hpp"

namespace meshfft {

// Mesh interconnect timing. One 32-bit wavelet crosses a link per cycle in
// each direction; a complex sample needs `cycles_per_complex` wavelets.
struct FabricParams {
  int link_width_bits = 32;
  int hop_latency_cycles = 1;
  int cycles_per_complex = 2;       // r: 1 for packed fp16 pairs, 2 for fp32
  std::int64_t reconfig_delay = 30;  // d: control wavelet to next sender's first data
  double clock_hz = 850e6;

  static FabricParams for_precision(Precision precision, std::int64_t reconfig_delay = 30, double clock_hz = 850e6);
  void validate() const;
};

// Ordered so that westbound work is processed before eastbound in a cycle.
enum class StreamDir : std::uint8_t { kWest = 0, kEast = 1 };

// kX exchanges within mesh rows (slot 0 ↔ memory), kY within mesh columns
// (slot 1 ↔ memory).
enum class MeshAxis : std::uint8_t { kX, kY };

inline constexpr int kFabricColors = 24;

struct Message {
  std::size_t sender = 0;
  std::size_t dest = 0;
  std::int64_t stream_offset = 0;  // first element in the direction's stream
};

struct CaptureFilter {
  std::size_t sender = 0;
  std::int64_t stream_offset = 0;
  std::int64_t capture_count = 0;
};

// Broadcast-and-filter schedule for transposing the data held by one line
// of p PEs. Each direction is a single stream: senders take turns in
// `sender_order`, each broadcasting its messages nearest-destination first
// and closing with a control wavelet that hands the stream to the next
// router after the reconfiguration delay.
struct TransposePlan {
  std::size_t p = 0;
  std::size_t m = 0;
  std::size_t width = 0;  // pencils along the untouched local axis (m in 3D, 1 in 2D)
  std::int64_t message_elements = 0;
  int colors = 4;  // two per direction

  std::array<std::vector<std::size_t>, 2> sender_order;
  std::array<std::vector<std::vector<Message>>, 2> sends;          // [dir][pe]
  std::array<std::vector<std::vector<CaptureFilter>>, 2> filters;  // [dir][pe]
  std::array<std::vector<std::int64_t>, 2> control_positions;      // [dir][turn]

  std::int64_t elements_sent(StreamDir dir, std::size_t pe) const;
  std::int64_t stream_length(StreamDir dir) const;
};

constexpr std::size_t dir_index(StreamDir d) { return static_cast<std::size_t>(d); }

// width == 0 means width = m (the 3D case).
TransposePlan build_transpose_plan(std::size_t p, std::size_t m, const FabricParams& params, std::size_t width = 0);

// Throws InvalidArgument describing the first violated plan invariant.
void check_transpose_plan(const TransposePlan& plan);

// Where the samples of one line live inside each PE buffer. Message
// element t = (s·width + k)·m + c maps to src offset
// s·swap_stride + k·keep_stride + dest·m + c on the sender and to
// c·swap_stride + k·keep_stride + sender·m + s on the receiver.
struct RowGeometry {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t width = 0;
  std::size_t swap_stride = 0;
  std::size_t keep_stride = 0;

  std::size_t buffer_size() const { return m * width * n; }
};

RowGeometry geometry_3d(MeshAxis axis, std::size_t n, std::size_t m);
RowGeometry geometry_2d(std::size_t n, std::size_t m);

struct ElementOffsets {
  std::size_t src = 0;
  std::size_t dst = 0;
};

ElementOffsets message_offsets(const RowGeometry& g, std::size_t sender, std::size_t dest, std::int64_t t);

// Direct data movement for one line: element (i, j) of the distributed
// 2D view moves from PE i to PE j. Applying it twice is the identity.
void execute_transpose(std::span<const std::span<Complex>> buffers, const TransposePlan& plan, const RowGeometry& geometry);

// The p blocks of mesh row/column `line` (for kX: all blocks with y = line).
std::vector<std::span<Complex>> line_buffers(std::vector<PeBlock>& blocks, const MeshShape& mesh, MeshAxis axis,
                                             std::size_t line);

void execute_transpose(std::vector<PeBlock>& blocks, const MeshShape& mesh, MeshAxis axis, std::size_t line,
                       const TransposePlan& plan);

// Every line along `axis`, functionally.
void redistribute(std::vector<PeBlock>& blocks, const MeshShape& mesh, MeshAxis axis, const TransposePlan& plan);

struct LinkStats {
  std::int64_t data_wavelets = 0;
  std::int64_t control_wavelets = 0;
  std::int64_t busy_cycles = 0;
  std::int64_t first_busy = -1;
  std::int64_t last_busy = -1;

  bool operator==(const LinkStats&) const = default;
};

struct DesResult {
  std::int64_t total_cycles = 0;
  std::array<std::int64_t, 2> stream_cycles{};  // [dir]
  // [dir][k]: east link k is PE k -> k+1, west link k is PE k+1 -> k.
  std::array<std::vector<LinkStats>, 2> links;
  std::int64_t events = 0;
  std::int64_t captured_elements = 0;

  std::int64_t max_link_data_wavelets() const;
  bool operator==(const DesResult&) const = default;
};

enum class TraceKind : std::uint8_t { kData, kControl, kCapture, kReconfig };

struct TraceRecord {
  std::int64_t cycle = 0;
  StreamDir dir = StreamDir::kEast;
  std::size_t from = 0;
  std::size_t to = 0;
  TraceKind kind = TraceKind::kData;
};

struct DesOptions {
  std::int64_t event_budget = 100'000'000;
  std::vector<TraceRecord>* trace = nullptr;
};

// Exact number of events simulate_row_transpose will process.
std::int64_t estimate_des_events(const TransposePlan& plan, const FabricParams& params);

// Timing only.
DesResult simulate_row_transpose(const TransposePlan& plan, const FabricParams& params, const DesOptions& options = {});

// Timing plus data movement: captured samples are written into `buffers`
// according to the router filters.
DesResult simulate_row_transpose(const TransposePlan& plan, const FabricParams& params,
                                 std::span<const std::span<Complex>> buffers, const RowGeometry& geometry,
                                 const DesOptions& options = {});

// Simulates every line along `axis`; lines run concurrently on the fabric so
// the phase takes the slowest line's cycles. The budget covers all lines.
DesResult simulate_full_redistribution(std::vector<PeBlock>& blocks, const MeshShape& mesh, MeshAxis axis,
                                       const TransposePlan& plan, const FabricParams& params,
                                       const DesOptions& options = {});

// CSV columns: cycle,dir,from,to,event. For debugging only; not a stable format.
void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace);

}  // namespace meshfft
