#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace meshfft {

using Complex = std::complex<float>;
using ComplexD = std::complex<double>;

enum class Direction { kForward, kInverse };

bool is_power_of_two(std::size_t n);

// log2 of a power of two; throws InvalidArgument for anything else.
unsigned log2_exact(std::size_t n);

// Twiddle factors e^{∓2πij/n} for j in [0, n/2), natural order. The stage
// with S interleaved subproblems reads entry k·S for butterfly row k.
class RootTable {
 public:
  RootTable(std::size_t n, Direction direction);

  std::size_t size() const { return n_; }
  Direction direction() const { return direction_; }
  std::span<const Complex> entries() const { return entries_; }

  // Negates one entry. Only used to check that validation detects faults.
  void inject_fault(std::size_t index);

 private:
  std::size_t n_;
  Direction direction_;
  std::vector<Complex> entries_;
};

RootTable precompute_roots(std::size_t n, Direction direction);

// One line of samples plus the equally sized workspace the transform
// needs (the kernel is out-of-place with respect to the scratch half).
class Pencil {
 public:
  explicit Pencil(std::size_t n);
  explicit Pencil(std::vector<Complex> values);

  std::size_t size() const { return values_.size(); }
  std::span<Complex> values() { return values_; }
  std::span<const Complex> values() const { return values_; }
  std::span<Complex> scratch() { return scratch_; }

 private:
  std::vector<Complex> values_;
  std::vector<Complex> scratch_;
};

// Radix-2 decimation-in-time transform with reshape-based reordering.
// Natural-order in, natural-order out. `scratch` must be at least
// values.size()/2 long. Inverse tables also apply the 1/n scaling.
// No argument validation; this is the per-pencil hot path.
void transform_pencil(std::span<Complex> values, std::span<Complex> scratch,
                      const RootTable& roots);

Pencil fft_pencil(const Pencil& x, const RootTable& roots);
Pencil ifft_pencil(const Pencil& x, const RootTable& roots);

// Direct O(n²) DFT in double precision, any n ≥ 1. Inverse is normalized
// by 1/n.
std::vector<ComplexD> dft_reference(std::span<const ComplexD> x, Direction direction);

// ||got − want||₂ / ||want||₂, or ||got||₂ when want is all zeros.
double relative_l2_error(std::span<const Complex> got, std::span<const ComplexD> want);
double relative_l2_error(std::span<const ComplexD> got, std::span<const ComplexD> want);

void require_finite(std::span<const Complex> values);

}  // namespace meshfft
