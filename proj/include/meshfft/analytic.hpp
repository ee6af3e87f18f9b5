#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "meshfft/precision.hpp"

namespace meshfft {

inline constexpr std::int64_t kDefaultReconfigDelay = 30;
inline constexpr double kDefaultClockHz = 850e6;

// Per-pencil compute cycles = a·n·log2 n + b·n + c·log2 n, from the
// instruction mix of the pencil kernel at each precision's SIMD width.
struct CostProfile {
  Precision precision;
  int r;     // link cycles per complex
  double a;  // n·log2 n coefficient
  double b;  // n coefficient (reshape phases, inner-loop setup)
  double c;  // log2 n coefficient (outer-loop management)

  std::string_view name() const { return to_string(precision); }
  // Flops per cycle as n grows: 5 n log2 n flops over a·n·log2 n cycles.
  double simd_asymptote() const { return 5.0 / a; }

  static const CostProfile& fp16();
  static const CostProfile& fp32();
  static const CostProfile& of(Precision precision);
};

// Cycles are doubles: model terms are integers, but measurement-derived
// splits (RT_comm / 2 per transpose, halving estimates) need not be.
struct PhaseBreakdown {
  double compute_cycles_per_superstep = 0;
  int superstep_count = 0;
  double comm_cycles_per_transpose = 0;
  int transpose_count = 0;
  double overhead_cycles = 0;
  double total_cycles = 0;
  double rt_comm = 0;  // aggregate communication
  double rt_cmpt = 0;  // aggregate computation
};

struct ThroughputReport {
  double cycles = 0;
  double seconds = 0;
  double flops = 0;
  double tflops_per_s = 0;
};

// One measured 3D run on an n×n submesh, one pencil per PE.
struct MeasuredEntry {
  std::size_t n;
  Precision precision;
  std::int64_t cycles;
};

class MeasuredBaseline {
 public:
  // The published CS-2 cycle counts (FFT+IFFT pairs, halved; max over edge PEs).
  static const MeasuredBaseline& cs2();

  std::span<const MeasuredEntry> entries() const { return entries_; }
  std::optional<std::int64_t> lookup(std::size_t n, Precision precision) const;
  // Throws InvalidArgument when absent.
  std::int64_t at(std::size_t n, Precision precision) const;

 private:
  explicit MeasuredBaseline(std::span<const MeasuredEntry> entries) : entries_(entries) {}
  std::span<const MeasuredEntry> entries_;
};

// Measured single-PE pencil throughputs (flops/cycle) at the largest size
// that fits each precision.
inline constexpr double kMeasuredPencilRateFp16N4096 = 0.89;
inline constexpr double kMeasuredPencilRateFp32N2048 = 0.57;

double pencil_flops(std::size_t n);  // 5 n log2 n
double fft3d_flops(std::size_t n);   // 3 n² · 5 n log2 n

std::int64_t pencil_compute_cycles(std::size_t n, const CostProfile& profile);

// TT_comm(n, m, r) = n²/2·m·r − n/2·m²·r + d·(n/m − 1)
std::int64_t transpose_cycles(std::size_t n, std::size_t m, int r, std::int64_t d = kDefaultReconfigDelay);

// Same quantity from the line view: p(p−1)/2 messages of `message_elements`
// samples over the busiest link, plus d per router handoff.
std::int64_t line_transpose_cycles(std::size_t p, std::int64_t message_elements, int r,
                                   std::int64_t d = kDefaultReconfigDelay);

PhaseBreakdown fft3d_model(std::size_t n, std::size_t m, const CostProfile& profile,
                           std::int64_t d = kDefaultReconfigDelay);

// Splits a measured total: computation is the pencil model times three,
// the rest is attributed to communication.
PhaseBreakdown split_measured(std::size_t n, const CostProfile& profile,
                              const MeasuredBaseline& baseline = MeasuredBaseline::cs2());

// ET_total(n, m) = m·RT_comm(n, 1) + m²·RT_cmpt(n, 1)
PhaseBreakdown estimate_strong_scaling(std::size_t n, std::size_t m, const PhaseBreakdown& single_pencil);

// ET_total(2n) = 4·RT_comm(n) + 3·pencil(2n), with RT_comm from the measured split.
PhaseBreakdown estimate_weak_doubling(std::size_t measured_n, const CostProfile& profile,
                                      const MeasuredBaseline& baseline = MeasuredBaseline::cs2());
PhaseBreakdown estimate_weak_1024(const CostProfile& profile, const MeasuredBaseline& baseline = MeasuredBaseline::cs2());

ThroughputReport throughput(std::size_t n, double total_cycles, double clock_hz = kDefaultClockHz);

// Total bytes moved per hop by all routers for the two redistributions:
// every broadcast sample travels to the end of its line.
double router_byte_hops(std::size_t n, std::size_t m, int r, int link_width_bits = 32);
double router_bandwidth(std::size_t n, std::size_t m, int r, double total_cycles, double clock_hz = kDefaultClockHz);

// Lower bound for transposing an n×n problem on a √n×√n mesh: n²/4 samples
// cross √n bisection links each way.
double bisection_bound_2d(std::size_t n, int r);

double host_transfer_time(std::size_t n, int bytes_per_complex, int directions, double bits_per_second = 1.2e12);

// Full-wafer pencil throughput. With no rate given the cycle model is used.
double peak_machine_extrapolation(const CostProfile& profile, std::size_t pe_count = 850'000, std::size_t n = 2048,
                                  double clock_hz = kDefaultClockHz,
                                  std::optional<double> measured_flops_per_cycle = std::nullopt);

}  // namespace meshfft
