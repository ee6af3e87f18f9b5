#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "meshfft/analytic.hpp"
#include "meshfft/fabric.hpp"
#include "meshfft/layout.hpp"
#include "meshfft/numerics.hpp"
#include "meshfft/precision.hpp"

namespace meshfft {

enum class TimingMode { kNone, kAnalytic, kDes };

struct FftJobSpec {
  int dims = 3;
  std::size_t n = 0;
  std::size_t p = 1;  // mesh edge; m = n / p (p = 1 for 1D)
  Precision precision = Precision::kFp32;
  Direction direction = Direction::kForward;
  TimingMode timing = TimingMode::kAnalytic;
  std::int64_t reconfig_delay = kDefaultReconfigDelay;
  double clock_hz = kDefaultClockHz;
  std::int64_t event_budget = 100'000'000;
  unsigned workers = 1;  // threads for per-PE pencil work within a superstep

  std::size_t m() const { return n / p; }
  int supersteps() const { return dims; }
  int transposes() const { return dims - 1; }
  FabricParams fabric() const;

  // Shape, divisibility and per-PE memory. Throws InvalidArgument or Infeasible.
  void validate() const;
};

struct FftResult {
  Grid3 output;
  PhaseBreakdown breakdown;
  std::vector<DesResult> transposes;  // filled when timing = des
};

struct Fft2dResult {
  Grid2 output;
  PhaseBreakdown breakdown;
  std::vector<DesResult> transposes;
};

struct Fft1dResult {
  std::vector<Complex> output;
  PhaseBreakdown breakdown;
};

// z superstep, x↔z exchange within mesh rows, x superstep, x↔y exchange
// within mesh columns, y superstep. The output keeps the resulting
// orientation (storage slots z, x, y); see FftResult::output.order().
FftResult run_fft(const FftJobSpec& job, const Grid3& grid);

// Inverse transform; undoes the forward exchanges in reverse order and
// always returns canonical (x, y, z) orientation.
FftResult run_ifft(const FftJobSpec& job, const Grid3& grid);

// a(u, v) with pencil v on PE u / m; one exchange between the two supersteps.
// The output is returned in canonical orientation.
Fft2dResult run_fft2d(const FftJobSpec& job, const Grid2& grid);

Fft1dResult run_fft1d(const FftJobSpec& job, std::span<const Complex> values);

// Phase cycle totals for the job. Analytic mode uses the closed forms; des
// mode simulates one line per exchange. Throws BudgetExceeded when the
// simulation is too large.
PhaseBreakdown account_cycles(const FftJobSpec& job, std::vector<DesResult>* des_results = nullptr);

}  // namespace meshfft
