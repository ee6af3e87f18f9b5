#include <algorithm>
#include <deque>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "meshfft/errors.hpp"
#include "meshfft/fabric.hpp"

namespace meshfft {

std::int64_t DesResult::max_link_data_wavelets() const {
  std::int64_t best = 0;
  for (const auto& per_dir : links) {
    for (const auto& link : per_dir) best = std::max(best, link.data_wavelets);
  }
  return best;
}

std::int64_t estimate_des_events(const TransposePlan& plan, const FabricParams& params) {
  std::int64_t events = 0;
  for (StreamDir dir : {StreamDir::kWest, StreamDir::kEast}) {
    const auto& order = plan.sender_order[dir_index(dir)];
    for (std::size_t turn = 0; turn < order.size(); ++turn) {
      const auto hops = static_cast<std::int64_t>(plan.p - 1 - turn);
      const std::int64_t wavelets = plan.elements_sent(dir, order[turn]) * params.cycles_per_complex;
      // data traversals to the end of the line, one control hop, one reconfiguration
      events += wavelets * hops + 2;
    }
  }
  return events;
}

namespace {

constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();

struct Wavelet {
  std::int64_t ready = 0;
  std::int64_t element = 0;  // index in the direction's stream
  std::uint32_t message = 0;
  std::uint16_t part = 0;
  bool control = false;
};

struct Capture {
  const std::span<const std::span<Complex>>* buffers = nullptr;
  const std::vector<std::vector<Complex>>* old = nullptr;
  const RowGeometry* geometry = nullptr;
};

// One broadcast stream along a line. Positions count downstream from the
// first sender; position q forwards on link q to position q + 1.
class StreamSim {
 public:
  StreamSim(StreamDir dir, const TransposePlan& plan, const FabricParams& params, DesResult& result,
            const DesOptions& options, const Capture& capture)
      : dir_(dir),
        d_(dir_index(dir)),
        plan_(plan),
        params_(params),
        result_(result),
        options_(options),
        capture_(capture),
        p_(plan.p),
        inbox_(plan.p),
        filter_cursor_(plan.p, 0) {
    for (const auto& msgs : plan.sends[d_]) {
      for (const auto& msg : msgs) messages_.push_back(msg);
    }
    std::sort(messages_.begin(), messages_.end(),
              [](const Message& a, const Message& b) { return a.stream_offset < b.stream_offset; });
    for (std::size_t pe = 0; pe < p_; ++pe) {
      windows_.push_back(plan.filters[d_][pe]);
      std::sort(windows_.back().begin(), windows_.back().end(),
                [](const CaptureFilter& a, const CaptureFilter& b) { return a.stream_offset < b.stream_offset; });
    }
    result_.links[d_].assign(p_ - 1, {});
    begin_turn(0, 0);
  }

  bool done() const { return turn_ == p_ - 1 && in_flight_ == 0; }
  std::int64_t completion() const { return std::max(turn_start_, last_arrival_); }

  // Earliest cycle at which this stream can make progress.
  std::int64_t next_activity(std::int64_t now) const {
    if (done()) return kNever;
    if (in_flight_ > 0) return now;
    return turn_ < p_ - 1 ? std::max(now, turn_start_) : kNever;
  }

  // Lets the router at `pe` use its outgoing link for cycle t.
  void step_router(std::size_t pe, std::int64_t t) {
    const std::size_t q = position_of(pe);
    if (q + 1 >= p_) return;
    auto& queue = inbox_[q];
    if (!queue.empty() && queue.front().ready <= t) {
      const Wavelet w = queue.front();
      queue.pop_front();
      --in_flight_;
      transmit(q, w, t);
    } else if (q == turn_ && t >= turn_start_ && !control_sent_) {
      transmit(q, next_local_wavelet(), t);
    }
  }

 private:
  std::size_t position_of(std::size_t pe) const { return dir_ == StreamDir::kEast ? pe : p_ - 1 - pe; }
  std::size_t pe_at(std::size_t q) const { return dir_ == StreamDir::kEast ? q : p_ - 1 - q; }
  std::size_t link_index(std::size_t q) const { return dir_ == StreamDir::kEast ? q : p_ - 2 - q; }

  void trace(std::int64_t cycle, std::size_t from_q, std::size_t to_q, TraceKind kind) {
    if (options_.trace) options_.trace->push_back({cycle, dir_, pe_at(from_q), pe_at(to_q), kind});
  }

  void begin_turn(std::size_t q, std::int64_t start) {
    turn_ = q;
    turn_start_ = start;
    control_sent_ = false;
    if (q + 1 < p_) {
      const std::size_t sender = pe_at(q);
      local_begin_ = plan_.sends[d_][sender].empty() ? 0 : plan_.sends[d_][sender].front().stream_offset;
      local_end_ = local_begin_ + plan_.elements_sent(dir_, sender);
      local_next_ = local_begin_;
      local_part_ = 0;
    }
  }

  Wavelet next_local_wavelet() {
    Wavelet w;
    if (local_next_ >= local_end_) {
      w.control = true;
      control_sent_ = true;
      return w;
    }
    w.element = local_next_;
    w.part = static_cast<std::uint16_t>(local_part_);
    while (message_cursor_ + 1 < messages_.size() && messages_[message_cursor_ + 1].stream_offset <= local_next_) {
      ++message_cursor_;
    }
    w.message = static_cast<std::uint32_t>(message_cursor_);
    if (++local_part_ == params_.cycles_per_complex) {
      local_part_ = 0;
      ++local_next_;
    }
    return w;
  }

  void transmit(std::size_t q, Wavelet w, std::int64_t t) {
    auto& link = result_.links[d_][link_index(q)];
    ++link.busy_cycles;
    if (link.first_busy < 0) link.first_busy = t;
    link.last_busy = t;
    ++result_.events;
    const std::int64_t arrival = t + params_.hop_latency_cycles;
    const std::size_t next = q + 1;

    if (w.control) {
      ++link.control_wavelets;
      trace(t, q, next, TraceKind::kControl);
      // The next router starts `d` cycles after the control wavelet leaves,
      // and never before it has arrived.
      const std::int64_t start = std::max(t + params_.reconfig_delay, arrival);
      ++result_.events;
      trace(start, next, next, TraceKind::kReconfig);
      begin_turn(next, start);
      return;
    }

    ++link.data_wavelets;
    trace(t, q, next, TraceKind::kData);
    last_arrival_ = std::max(last_arrival_, arrival);
    deliver(next, w, arrival);
    if (next + 1 < p_) {
      w.ready = arrival;
      inbox_[next].push_back(w);
      ++in_flight_;
    }
  }

  // Count-based filter: elements reach a router in stream order, so each
  // router walks its sorted windows once.
  void deliver(std::size_t q, const Wavelet& w, std::int64_t arrival) {
    if (w.part + 1 != params_.cycles_per_complex) return;
    const std::size_t pe = pe_at(q);
    auto& cursor = filter_cursor_[pe];
    const auto& windows = windows_[pe];
    while (cursor < windows.size() && windows[cursor].stream_offset + windows[cursor].capture_count <= w.element) ++cursor;
    if (cursor == windows.size() || windows[cursor].stream_offset > w.element) return;

    ++result_.captured_elements;
    trace(arrival, q, q, TraceKind::kCapture);
    if (capture_.buffers == nullptr) return;
    const Message& msg = messages_[w.message];
    const auto off = message_offsets(*capture_.geometry, msg.sender, pe, w.element - msg.stream_offset);
    (*capture_.buffers)[pe][off.dst] = (*capture_.old)[msg.sender][off.src];
  }

  StreamDir dir_;
  std::size_t d_;
  const TransposePlan& plan_;
  const FabricParams& params_;
  DesResult& result_;
  const DesOptions& options_;
  Capture capture_;
  std::size_t p_;

  std::vector<Message> messages_;
  std::vector<std::vector<CaptureFilter>> windows_;  // by PE
  std::vector<std::deque<Wavelet>> inbox_;           // by position
  std::vector<std::size_t> filter_cursor_;           // by PE
  std::int64_t in_flight_ = 0;
  std::int64_t last_arrival_ = 0;

  std::size_t turn_ = 0;
  std::int64_t turn_start_ = 0;
  bool control_sent_ = false;
  std::int64_t local_begin_ = 0;
  std::int64_t local_end_ = 0;
  std::int64_t local_next_ = 0;
  int local_part_ = 0;
  std::size_t message_cursor_ = 0;
};

DesResult run(const TransposePlan& plan, const FabricParams& params, const DesOptions& options, const Capture& capture) {
  params.validate();
  check_transpose_plan(plan);
  const std::int64_t estimate = estimate_des_events(plan, params);
  if (estimate > options.event_budget) {
    throw BudgetExceeded(fmt::format(
        "wavelet simulation of a {}-PE line (m={}) needs {} events, budget is {}; use analytic timing instead",
        plan.p, plan.m, estimate, options.event_budget));
  }

  DesResult result;
  StreamSim west(StreamDir::kWest, plan, params, result, options, capture);
  StreamSim east(StreamDir::kEast, plan, params, result, options, capture);

  std::int64_t t = 0;
  while (!west.done() || !east.done()) {
    // Fixed tie order: westbound before eastbound, lower PE index first.
    for (std::size_t pe = 0; pe < plan.p; ++pe) west.step_router(pe, t);
    for (std::size_t pe = 0; pe < plan.p; ++pe) east.step_router(pe, t);
    const std::int64_t next = std::min(west.next_activity(t + 1), east.next_activity(t + 1));
    if (next == kNever) break;
    t = next;
  }

  result.stream_cycles[dir_index(StreamDir::kWest)] = west.completion();
  result.stream_cycles[dir_index(StreamDir::kEast)] = east.completion();
  result.total_cycles = std::max(west.completion(), east.completion());
  return result;
}

}  // namespace

DesResult simulate_row_transpose(const TransposePlan& plan, const FabricParams& params, const DesOptions& options) {
  return run(plan, params, options, Capture{});
}

DesResult simulate_row_transpose(const TransposePlan& plan, const FabricParams& params,
                                 std::span<const std::span<Complex>> buffers, const RowGeometry& geometry,
                                 const DesOptions& options) {
  if (buffers.size() != plan.p || geometry.m != plan.m || geometry.width != plan.width || geometry.n != plan.p * plan.m) {
    throw InvalidArgument("buffers or geometry inconsistent with transpose plan");
  }
  for (const auto& b : buffers) {
    if (b.size() != geometry.buffer_size()) throw InvalidArgument("PE buffer size inconsistent with row geometry");
  }
  std::vector<std::vector<Complex>> old(plan.p);
  for (std::size_t pe = 0; pe < plan.p; ++pe) old[pe].assign(buffers[pe].begin(), buffers[pe].end());
  // Local cubes never touch the fabric.
  for (std::size_t pe = 0; pe < plan.p; ++pe) {
    for (std::int64_t t = 0; t < plan.message_elements; ++t) {
      const auto off = message_offsets(geometry, pe, pe, t);
      buffers[pe][off.dst] = old[pe][off.src];
    }
  }
  return run(plan, params, options, Capture{&buffers, &old, &geometry});
}

DesResult simulate_full_redistribution(std::vector<PeBlock>& blocks, const MeshShape& mesh, MeshAxis axis,
                                       const TransposePlan& plan, const FabricParams& params,
                                       const DesOptions& options) {
  if (plan.p != mesh.p || plan.m != mesh.m || plan.width != mesh.m) {
    throw InvalidArgument("transpose plan does not match mesh shape");
  }
  const std::int64_t per_line = estimate_des_events(plan, params);
  if (per_line * static_cast<std::int64_t>(mesh.p) > options.event_budget) {
    throw BudgetExceeded(fmt::format("simulating {} lines needs {} events, budget is {}; use analytic timing instead",
                                     mesh.p, per_line * static_cast<std::int64_t>(mesh.p), options.event_budget));
  }
  const auto geometry = geometry_3d(axis, mesh.p * mesh.m, mesh.m);
  DesResult slowest;
  std::int64_t events = 0;
  std::int64_t captured = 0;
  for (std::size_t line = 0; line < mesh.p; ++line) {
    const auto buffers = line_buffers(blocks, mesh, axis, line);
    DesResult r = simulate_row_transpose(plan, params, buffers, geometry, options);
    events += r.events;
    captured += r.captured_elements;
    if (line == 0 || r.total_cycles > slowest.total_cycles) slowest = std::move(r);
  }
  slowest.events = events;
  slowest.captured_elements = captured;
  return slowest;
}

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace) {
  static constexpr const char* kKinds[] = {"data", "control", "capture", "reconfig"};
  out << "cycle,dir,from,to,event\n";
  for (const auto& r : trace) {
    out << r.cycle << ',' << (r.dir == StreamDir::kEast ? "east" : "west") << ',' << r.from << ',' << r.to << ','
        << kKinds[static_cast<int>(r.kind)] << '\n';
  }
}

}  // namespace meshfft
