#include "meshfft/analytic.hpp"

#include <array>
#include <cmath>

#include <fmt/format.h>

#include "meshfft/errors.hpp"
#include "meshfft/numerics.hpp"

namespace meshfft {

const CostProfile& CostProfile::fp16() {
  static const CostProfile profile{Precision::kFp16, 1, 3.0, 34.0, 34.0};
  return profile;
}

const CostProfile& CostProfile::fp32() {
  static const CostProfile profile{Precision::kFp32, 2, 6.5, 35.0, 36.0};
  return profile;
}

const CostProfile& CostProfile::of(Precision precision) {
  return precision == Precision::kFp16 ? fp16() : fp32();
}

namespace {

// Table of measured 3D cycle counts on n×n submeshes.
constexpr std::array<MeasuredEntry, 10> kCs2Table{{
    {32, Precision::kFp16, 10'953},
    {32, Precision::kFp32, 13'633},
    {64, Precision::kFp16, 24'000},
    {64, Precision::kFp32, 32'176},
    {128, Precision::kFp16, 56'741},
    {128, Precision::kFp32, 82'405},
    {256, Precision::kFp16, 147'247},
    {256, Precision::kFp32, 236'329},
    {512, Precision::kFp16, 471'064},
    {512, Precision::kFp32, 815'371},
}};

void require_pencil_size(std::size_t n) {
  if (n < 2 || !is_power_of_two(n)) throw InvalidArgument(fmt::format("pencil size {} must be a power of two >= 2", n));
}

}  // namespace

const MeasuredBaseline& MeasuredBaseline::cs2() {
  static const MeasuredBaseline baseline(kCs2Table);
  return baseline;
}

std::optional<std::int64_t> MeasuredBaseline::lookup(std::size_t n, Precision precision) const {
  for (const auto& e : entries_) {
    if (e.n == n && e.precision == precision) return e.cycles;
  }
  return std::nullopt;
}

std::int64_t MeasuredBaseline::at(std::size_t n, Precision precision) const {
  if (auto v = lookup(n, precision)) return *v;
  throw InvalidArgument(fmt::format("no measured baseline for n={} {}", n, to_string(precision)));
}

double pencil_flops(std::size_t n) {
  require_pencil_size(n);
  return 5.0 * static_cast<double>(n) * log2_exact(n);
}

double fft3d_flops(std::size_t n) {
  const double nd = static_cast<double>(n);
  return 3.0 * nd * nd * pencil_flops(n);
}

std::int64_t pencil_compute_cycles(std::size_t n, const CostProfile& profile) {
  require_pencil_size(n);
  const double nd = static_cast<double>(n);
  const double lg = log2_exact(n);
  return std::llround(profile.a * nd * lg + profile.b * nd + profile.c * lg);
}

std::int64_t transpose_cycles(std::size_t n, std::size_t m, int r, std::int64_t d) {
  if (m == 0 || n % m != 0) throw InvalidArgument(fmt::format("m={} does not divide n={}", m, n));
  if (r != 1 && r != 2) throw InvalidArgument(fmt::format("r must be 1 or 2, got {}", r));
  const auto N = static_cast<std::int64_t>(n);
  const auto M = static_cast<std::int64_t>(m);
  // n² m r / 2 and n m² r / 2 are integers whenever n is even; n = 1 only
  // occurs with m = 1 where both terms cancel.
  return (N * N * M * r - N * M * M * r) / 2 + d * (N / M - 1);
}

std::int64_t line_transpose_cycles(std::size_t p, std::int64_t message_elements, int r, std::int64_t d) {
  const auto P = static_cast<std::int64_t>(p);
  return P * (P - 1) / 2 * message_elements * r + d * (P - 1);
}

PhaseBreakdown fft3d_model(std::size_t n, std::size_t m, const CostProfile& profile, std::int64_t d) {
  PhaseBreakdown b;
  b.superstep_count = 3;
  b.transpose_count = 2;
  b.compute_cycles_per_superstep = static_cast<double>(m * m) * static_cast<double>(pencil_compute_cycles(n, profile));
  b.comm_cycles_per_transpose = static_cast<double>(transpose_cycles(n, m, profile.r, d));
  b.rt_cmpt = b.superstep_count * b.compute_cycles_per_superstep;
  b.rt_comm = b.transpose_count * b.comm_cycles_per_transpose;
  b.total_cycles = b.rt_cmpt + b.rt_comm;
  return b;
}

PhaseBreakdown split_measured(std::size_t n, const CostProfile& profile, const MeasuredBaseline& baseline) {
  const auto measured = static_cast<double>(baseline.at(n, profile.precision));
  PhaseBreakdown b;
  b.superstep_count = 3;
  b.transpose_count = 2;
  b.compute_cycles_per_superstep = static_cast<double>(pencil_compute_cycles(n, profile));
  b.rt_cmpt = 3.0 * b.compute_cycles_per_superstep;
  b.rt_comm = measured - b.rt_cmpt;
  b.comm_cycles_per_transpose = b.rt_comm / 2.0;
  b.total_cycles = measured;
  return b;
}

PhaseBreakdown estimate_strong_scaling(std::size_t n, std::size_t m, const PhaseBreakdown& single_pencil) {
  if (m < 1 || !is_power_of_two(m) || n % m != 0) {
    throw InvalidArgument(fmt::format("m={} must be a power of two dividing n={}", m, n));
  }
  const double md = static_cast<double>(m);
  PhaseBreakdown b = single_pencil;
  b.rt_comm = md * single_pencil.rt_comm;
  b.rt_cmpt = md * md * single_pencil.rt_cmpt;
  b.comm_cycles_per_transpose = b.rt_comm / b.transpose_count;
  b.compute_cycles_per_superstep = b.rt_cmpt / b.superstep_count;
  b.overhead_cycles = 0;
  b.total_cycles = b.rt_comm + b.rt_cmpt;
  return b;
}

PhaseBreakdown estimate_weak_doubling(std::size_t measured_n, const CostProfile& profile, const MeasuredBaseline& baseline) {
  const PhaseBreakdown measured = split_measured(measured_n, profile, baseline);
  const std::size_t n = measured_n * 2;
  PhaseBreakdown b;
  b.superstep_count = 3;
  b.transpose_count = 2;
  // Doubling n at m = 1 at most quadruples each transpose.
  b.rt_comm = 4.0 * measured.rt_comm;
  b.compute_cycles_per_superstep = static_cast<double>(pencil_compute_cycles(n, profile));
  b.rt_cmpt = 3.0 * b.compute_cycles_per_superstep;
  b.comm_cycles_per_transpose = b.rt_comm / 2.0;
  b.total_cycles = b.rt_comm + b.rt_cmpt;
  return b;
}

PhaseBreakdown estimate_weak_1024(const CostProfile& profile, const MeasuredBaseline& baseline) {
  return estimate_weak_doubling(512, profile, baseline);
}

ThroughputReport throughput(std::size_t n, double total_cycles, double clock_hz) {
  if (!(total_cycles > 0) || !(clock_hz > 0)) throw InvalidArgument("cycles and clock must be positive");
  ThroughputReport t;
  t.cycles = total_cycles;
  t.seconds = total_cycles / clock_hz;
  t.flops = fft3d_flops(n);
  t.tflops_per_s = t.flops / t.seconds / 1e12;
  return t;
}

double router_byte_hops(std::size_t n, std::size_t m, int r, int link_width_bits) {
  if (m == 0 || n % m != 0) throw InvalidArgument(fmt::format("m={} does not divide n={}", m, n));
  const std::size_t p = n / m;
  const double bytes_per_sample = r * link_width_bits / 8.0;
  const double cube = static_cast<double>(m) * m * m;
  // Sum over senders of (messages) × (hops to the end of the line).
  double sum_k2 = 0;
  for (std::size_t k = 0; k < p; ++k) sum_k2 += static_cast<double>(k) * static_cast<double>(k);
  const double per_line_per_dir = sum_k2 * cube * bytes_per_sample;
  return 2.0 /* transposes */ * static_cast<double>(p) /* lines */ * 2.0 /* directions */ * per_line_per_dir;
}

double router_bandwidth(std::size_t n, std::size_t m, int r, double total_cycles, double clock_hz) {
  if (!(total_cycles > 0) || !(clock_hz > 0)) throw InvalidArgument("cycles and clock must be positive");
  return router_byte_hops(n, m, r) / (total_cycles / clock_hz);
}

double bisection_bound_2d(std::size_t n, int r) {
  const auto root = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (n == 0 || root * root != n) throw InvalidArgument(fmt::format("sqrt({}) is not an integer", n));
  const double nd = static_cast<double>(n);
  return nd * nd / 4.0 / static_cast<double>(root) * r;
}

double host_transfer_time(std::size_t n, int bytes_per_complex, int directions, double bits_per_second) {
  if (n == 0 || bytes_per_complex <= 0 || directions < 1 || directions > 2 || !(bits_per_second > 0)) {
    throw InvalidArgument("host transfer needs positive size, width, bandwidth and 1 or 2 directions");
  }
  const double nd = static_cast<double>(n);
  return directions * nd * nd * nd * bytes_per_complex * 8.0 / bits_per_second;
}

double peak_machine_extrapolation(const CostProfile& profile, std::size_t pe_count, std::size_t n, double clock_hz,
                                  std::optional<double> measured_flops_per_cycle) {
  const double rate = measured_flops_per_cycle
                          ? *measured_flops_per_cycle
                          : pencil_flops(n) / static_cast<double>(pencil_compute_cycles(n, profile));
  return static_cast<double>(pe_count) * rate * clock_hz / 1e12;
}

}  // namespace meshfft
