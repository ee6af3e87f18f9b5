#include "meshfft/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "meshfft/errors.hpp"
#include "meshfft/precision.hpp"

namespace meshfft {

Precision parse_precision(std::string_view text) {
  if (text == "fp16") return Precision::kFp16;
  if (text == "fp32") return Precision::kFp32;
  throw InvalidArgument(fmt::format("unknown precision '{}' (expected fp16 or fp32)", text));
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

unsigned log2_exact(std::size_t n) {
  if (!is_power_of_two(n)) {
    throw InvalidArgument(fmt::format("size {} is not a power of two", n));
  }
  unsigned log = 0;
  while ((std::size_t{1} << log) < n) ++log;
  return log;
}

RootTable::RootTable(std::size_t n, Direction direction) : n_(n), direction_(direction) {
  if (n < 2 || !is_power_of_two(n)) {
    throw InvalidArgument(fmt::format("root table size {} must be a power of two >= 2", n));
  }
  const double sign = direction == Direction::kForward ? -1.0 : 1.0;
  entries_.resize(n / 2);
  for (std::size_t j = 0; j < n / 2; ++j) {
    const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    entries_[j] = Complex(static_cast<float>(std::cos(angle)), static_cast<float>(std::sin(angle)));
  }
}

void RootTable::inject_fault(std::size_t index) {
  if (index >= entries_.size()) throw InvalidArgument("fault index outside root table");
  entries_[index] = -entries_[index];
}

RootTable precompute_roots(std::size_t n, Direction direction) { return RootTable(n, direction); }

Pencil::Pencil(std::size_t n) : values_(n), scratch_(n) {
  if (n < 2 || !is_power_of_two(n)) {
    throw InvalidArgument(fmt::format("pencil length {} must be a power of two >= 2", n));
  }
}

Pencil::Pencil(std::vector<Complex> values) : values_(std::move(values)), scratch_(values_.size()) {
  if (values_.size() < 2 || !is_power_of_two(values_.size())) {
    throw InvalidArgument(fmt::format("pencil length {} must be a power of two >= 2", values_.size()));
  }
}

// Layout invariant between stages: with S subproblems of length L = n/S,
// the lower half of `values` holds the even-child results and the upper
// half the odd-child results, element k of subproblem s at index k·S + s.
// Initially S = n/2 and subproblem s is {x[s], x[s + n/2]}, which is the
// natural input order.
void transform_pencil(std::span<Complex> values, std::span<Complex> scratch,
                      const RootTable& roots) {
  const std::size_t n = values.size();
  const std::size_t half = n / 2;
  const std::size_t quarter = half / 2;
  const auto twiddles = roots.entries();
  Complex* even = values.data();
  Complex* odd = values.data() + half;
  Complex* aux = scratch.data();

  for (std::size_t subproblems = half; subproblems >= 1; subproblems >>= 1) {
    const std::size_t rows = half / subproblems;

    // Twiddle the odd halves: one root per row, applied across all subproblems.
    for (std::size_t k = 0; k < rows; ++k) {
      const Complex w = twiddles[k * subproblems];
      Complex* src = odd + k * subproblems;
      Complex* dst = aux + k * subproblems;
      for (std::size_t s = 0; s < subproblems; ++s) dst[s] = src[s] * w;
    }

    // Butterflies: upper outputs land in aux, lower outputs stay in place.
    for (std::size_t i = 0; i < half; ++i) {
      const Complex t = aux[i];
      aux[i] = even[i] - t;
      even[i] = even[i] + t;
    }

    if (subproblems == 1) {
      std::copy(aux, aux + half, odd);
      break;
    }

    // Reshape for the next stage: subproblem s' pairs old s' (even child)
    // with old s' + S/2 (odd child).
    const std::size_t chunk = subproblems / 2;
    for (std::size_t k = 0; k < rows; ++k) {
      std::copy_n(even + k * subproblems + chunk, chunk, odd + k * chunk);
      std::copy_n(aux + k * subproblems + chunk, chunk, odd + quarter + k * chunk);
    }
    for (std::size_t k = 1; k < rows; ++k) {
      std::copy_n(even + k * subproblems, chunk, even + k * chunk);
    }
    for (std::size_t k = 0; k < rows; ++k) {
      std::copy_n(aux + k * subproblems, chunk, even + quarter + k * chunk);
    }
  }

  if (roots.direction() == Direction::kInverse) {
    const float scale = 1.0f / static_cast<float>(n);
    for (auto& v : values) v *= scale;
  }
}

void require_finite(std::span<const Complex> values) {
  for (const auto& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw NonFiniteInput("input contains NaN or Inf");
    }
  }
}

namespace {

Pencil apply(const Pencil& x, const RootTable& roots, Direction expected) {
  if (roots.direction() != expected) {
    throw InvalidArgument(expected == Direction::kForward ? "fft_pencil needs a forward root table"
                                                          : "ifft_pencil needs an inverse root table");
  }
  if (x.size() != roots.size()) {
    throw InvalidArgument(fmt::format("pencil length {} does not match root table size {}", x.size(), roots.size()));
  }
  require_finite(x.values());
  Pencil out(std::vector<Complex>(x.values().begin(), x.values().end()));
  transform_pencil(out.values(), out.scratch(), roots);
  return out;
}

}  // namespace

Pencil fft_pencil(const Pencil& x, const RootTable& roots) { return apply(x, roots, Direction::kForward); }

Pencil ifft_pencil(const Pencil& x, const RootTable& roots) { return apply(x, roots, Direction::kInverse); }

std::vector<ComplexD> dft_reference(std::span<const ComplexD> x, Direction direction) {
  for (const auto& v : x) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NonFiniteInput("input contains NaN or Inf");
  }
  const std::size_t n = x.size();
  const double sign = direction == Direction::kForward ? -1.0 : 1.0;
  std::vector<ComplexD> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    ComplexD acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      // Reduce j·k mod n first so the angle stays small and exact.
      const std::size_t jk = (j * k) % n;
      const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(jk) / static_cast<double>(n);
      acc += x[j] * ComplexD(std::cos(angle), std::sin(angle));
    }
    out[k] = direction == Direction::kInverse ? acc / static_cast<double>(n) : acc;
  }
  return out;
}

namespace {

template <typename T>
double rel_l2(std::span<const T> got, std::span<const ComplexD> want) {
  if (got.size() != want.size()) throw InvalidArgument("relative_l2_error: length mismatch");
  double diff = 0.0;
  double ref = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const ComplexD g(got[i].real(), got[i].imag());
    diff += std::norm(g - want[i]);
    ref += std::norm(want[i]);
  }
  return ref > 0.0 ? std::sqrt(diff / ref) : std::sqrt(diff);
}

}  // namespace

double relative_l2_error(std::span<const Complex> got, std::span<const ComplexD> want) { return rel_l2(got, want); }

double relative_l2_error(std::span<const ComplexD> got, std::span<const ComplexD> want) { return rel_l2(got, want); }

}  // namespace meshfft
