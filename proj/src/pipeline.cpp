#include "meshfft/pipeline.hpp"

#include <algorithm>
#include <functional>
#include <thread>

#include <fmt/format.h>

#include "meshfft/errors.hpp"

namespace meshfft {

FabricParams FftJobSpec::fabric() const {
  return FabricParams::for_precision(precision, reconfig_delay, clock_hz);
}

void FftJobSpec::validate() const {
  if (dims < 1 || dims > 3) throw InvalidArgument(fmt::format("dims must be 1, 2 or 3, got {}", dims));
  if (n < 2 || !is_power_of_two(n)) throw InvalidArgument(fmt::format("n={} must be a power of two >= 2", n));
  if (p < 1 || !is_power_of_two(p) || p > n) {
    throw InvalidArgument(fmt::format("p={} must be a power of two no larger than n={}", p, n));
  }
  if (dims == 1 && p != 1) throw InvalidArgument("a 1D transform runs on a single PE (p = 1)");
  if (workers < 1) throw InvalidArgument("workers must be >= 1");
  fabric().validate();
  // Per-PE residency: m^(dims-1) pencils, two copies.
  std::size_t pencils = 1;
  for (int i = 1; i < dims; ++i) pencils *= m();
  const std::size_t bytes = pencils * n * static_cast<std::size_t>(bytes_per_complex(precision)) * MemoryModel::kCopies;
  if (bytes > MemoryModel::kBytesPerPe) {
    throw Infeasible(fmt::format("{}D n={} on p={} needs {} bytes per PE ({}), only {} available", dims, n, p, bytes,
                                 to_string(precision), MemoryModel::kBytesPerPe));
  }
}

namespace {

constexpr AxisOrder kForwardOutput{{Axis::kZ, Axis::kX, Axis::kY}};

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
  const std::size_t threads = std::min<std::size_t>(workers, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += threads) body(i);
    });
  }
}

// Every PE transforms each of its resident pencils; no communication.
void superstep(std::vector<PeBlock>& blocks, const RootTable& roots, unsigned workers) {
  parallel_for(blocks.size(), workers, [&](std::size_t b) {
    auto& block = blocks[b];
    std::vector<Complex> scratch(block.n);
    for (std::size_t k = 0; k < block.pencil_count(); ++k) transform_pencil(block.pencil(k), scratch, roots);
  });
}

struct Exchange {
  MeshAxis axis;
  std::size_t slot;  // storage slot swapped with memory
};

constexpr Exchange kRowExchange{MeshAxis::kX, 0};
constexpr Exchange kColumnExchange{MeshAxis::kY, 1};

FftResult run_3d(const FftJobSpec& job, const Grid3& input, Direction direction) {
  job.validate();
  if (job.dims != 3) throw InvalidArgument("run_fft/run_ifft expect a 3D job");
  if (input.n() != job.n) throw InvalidArgument(fmt::format("grid edge {} does not match job n={}", input.n(), job.n));
  require_finite(input.values());

  // Inverse on a forward-oriented grid retraces the exchanges backwards.
  const bool retrace = direction == Direction::kInverse && input.order() == kForwardOutput;
  const Grid3 start = retrace ? input : input.canonical();
  const std::array<Exchange, 2> exchanges =
      retrace ? std::array{kColumnExchange, kRowExchange} : std::array{kRowExchange, kColumnExchange};

  const MeshShape mesh = MeshShape::for_problem(job.n, job.p);
  const RootTable roots(job.n, direction);
  auto blocks = distribute(start, mesh);
  AxisOrder order = start.order();

  superstep(blocks, roots, job.workers);
  for (const auto& ex : exchanges) {
    if (mesh.p > 1) {
      const auto plan = build_transpose_plan(mesh.p, mesh.m, job.fabric());
      redistribute(blocks, mesh, ex.axis, plan);
    } else {
      // A single PE holds the whole grid; the exchange is a local reorder.
      Grid3 local = gather(blocks, mesh, order);
      Grid3 swapped(job.n, order.swapped(ex.slot, 2));
      for (std::size_t a = 0; a < job.n; ++a)
        for (std::size_t b = 0; b < job.n; ++b)
          for (std::size_t c = 0; c < job.n; ++c) {
            std::array<std::size_t, 3> s{a, b, c};
            std::swap(s[ex.slot], s[2]);
            swapped.at_storage(s[0], s[1], s[2]) = local.at_storage(a, b, c);
          }
      blocks = distribute(swapped, mesh);
    }
    order = order.swapped(ex.slot, 2);
    superstep(blocks, roots, job.workers);
  }

  FftResult result;
  result.output = gather(blocks, mesh, order);
  if (direction == Direction::kInverse) result.output = result.output.canonical();
  FftJobSpec timed = job;
  timed.direction = direction;
  result.breakdown = account_cycles(timed, &result.transposes);
  return result;
}

}  // namespace

FftResult run_fft(const FftJobSpec& job, const Grid3& grid) { return run_3d(job, grid, Direction::kForward); }

FftResult run_ifft(const FftJobSpec& job, const Grid3& grid) { return run_3d(job, grid, Direction::kInverse); }

Fft2dResult run_fft2d(const FftJobSpec& job, const Grid2& grid) {
  job.validate();
  if (job.dims != 2) throw InvalidArgument("run_fft2d expects a 2D job");
  if (grid.n() != job.n) throw InvalidArgument(fmt::format("grid edge {} does not match job n={}", grid.n(), job.n));
  require_finite(grid.values());

  const std::size_t n = job.n;
  const std::size_t m = job.m();
  const RootTable roots(n, job.direction);
  Grid2 work = grid.canonical();

  // PE j owns storage rows [j·m, (j+1)·m): its m pencils are contiguous.
  std::vector<std::span<Complex>> buffers;
  for (std::size_t pe = 0; pe < job.p; ++pe) buffers.push_back(work.values().subspan(pe * m * n, m * n));
  auto compute = [&] {
    parallel_for(job.p, job.workers, [&](std::size_t pe) {
      std::vector<Complex> scratch(n);
      for (std::size_t k = 0; k < m; ++k) transform_pencil(buffers[pe].subspan(k * n, n), scratch, roots);
    });
  };

  compute();
  if (job.p > 1) {
    execute_transpose(buffers, build_transpose_plan(job.p, m, job.fabric(), 1), geometry_2d(n, m));
  } else {
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v) std::swap(work.values()[u * n + v], work.values()[v * n + u]);
  }
  work.set_transposed(true);
  compute();

  Fft2dResult result;
  result.output = work.canonical();
  result.breakdown = account_cycles(job, &result.transposes);
  return result;
}

Fft1dResult run_fft1d(const FftJobSpec& job, std::span<const Complex> values) {
  job.validate();
  if (job.dims != 1) throw InvalidArgument("run_fft1d expects a 1D job");
  if (values.size() != job.n) throw InvalidArgument(fmt::format("pencil length {} does not match job n={}", values.size(), job.n));
  const Pencil in(std::vector<Complex>(values.begin(), values.end()));
  const RootTable roots(job.n, job.direction);
  const Pencil out = job.direction == Direction::kForward ? fft_pencil(in, roots) : ifft_pencil(in, roots);
  Fft1dResult result;
  result.output.assign(out.values().begin(), out.values().end());
  result.breakdown = account_cycles(job);
  return result;
}

PhaseBreakdown account_cycles(const FftJobSpec& job, std::vector<DesResult>* des_results) {
  job.validate();
  const CostProfile& profile = CostProfile::of(job.precision);
  const std::size_t m = job.m();

  PhaseBreakdown b;
  if (job.timing == TimingMode::kNone) return b;
  b.superstep_count = job.supersteps();
  b.transpose_count = job.transposes();

  std::size_t pencils_per_pe = 1;
  for (int i = 1; i < job.dims; ++i) pencils_per_pe *= m;
  b.compute_cycles_per_superstep =
      static_cast<double>(pencils_per_pe) * static_cast<double>(pencil_compute_cycles(job.n, profile));

  if (b.transpose_count > 0 && job.p > 1) {
    const std::size_t width = job.dims == 3 ? m : 1;
    if (job.timing == TimingMode::kDes) {
      const auto params = job.fabric();
      const auto plan = build_transpose_plan(job.p, m, params, width);
      DesOptions options;
      options.event_budget = job.event_budget;
      std::int64_t slowest = 0;
      for (int i = 0; i < b.transpose_count; ++i) {
        DesResult r = simulate_row_transpose(plan, params, options);
        slowest = std::max(slowest, r.total_cycles);
        if (des_results) des_results->push_back(std::move(r));
      }
      b.comm_cycles_per_transpose = static_cast<double>(slowest);
    } else if (job.dims == 3) {
      b.comm_cycles_per_transpose = static_cast<double>(transpose_cycles(job.n, m, profile.r, job.reconfig_delay));
    } else {
      b.comm_cycles_per_transpose = static_cast<double>(
          line_transpose_cycles(job.p, static_cast<std::int64_t>(m * width * m), profile.r, job.reconfig_delay));
    }
  }

  b.rt_cmpt = b.superstep_count * b.compute_cycles_per_superstep;
  b.rt_comm = b.transpose_count * b.comm_cycles_per_transpose;
  b.total_cycles = b.rt_cmpt + b.rt_comm + b.overhead_cycles;
  return b;
}

}  // namespace meshfft
