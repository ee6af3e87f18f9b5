#include <doctest.h>

#include <cmath>
#include <limits>

#include "meshfft/errors.hpp"
#include "meshfft/numerics.hpp"
#include "oracle.hpp"

using namespace meshfft;

namespace {

Pencil make(std::initializer_list<Complex> v) { return Pencil(std::vector<Complex>(v)); }

void check_close(std::span<const Complex> got, std::initializer_list<Complex> want, float tol = 1e-6f) {
  REQUIRE(got.size() == want.size());
  std::size_t i = 0;
  for (const auto& w : want) {
    CHECK(std::abs(got[i] - w) < tol);
    ++i;
  }
}

}  // namespace

TEST_CASE("root table sizes and entries") {
  const RootTable two(2, Direction::kForward);
  REQUIRE(two.entries().size() == 1);
  CHECK(two.entries()[0] == Complex(1, 0));

  const RootTable four(4, Direction::kForward);
  REQUIRE(four.entries().size() == 2);
  const auto w = oracle::twiddles(4, false);
  for (const auto& e : four.entries()) {
    bool found = false;
    for (const auto& r : w) found |= std::abs(ComplexD(e) - r) < 1e-7;
    CHECK(found);
  }
  CHECK(std::abs(four.entries()[0] - Complex(1, 0)) < 1e-7f);
  CHECK(std::abs(four.entries()[1] - Complex(0, -1)) < 1e-7f);
}

TEST_CASE("inverse table conjugates the forward table") {
  for (std::size_t n : {2u, 8u, 64u, 4096u}) {
    const RootTable f(n, Direction::kForward);
    const RootTable i = precompute_roots(n, Direction::kInverse);
    REQUIRE(f.entries().size() == i.entries().size());
    for (std::size_t k = 0; k < f.entries().size(); ++k) {
      CHECK(i.entries()[k] == std::conj(f.entries()[k]));
      CHECK(std::abs(std::abs(f.entries()[k]) - 1.0f) < 1e-6f);
    }
  }
}

TEST_CASE("root table rejects bad sizes") {
  CHECK_THROWS_AS(RootTable(0, Direction::kForward), InvalidArgument);
  CHECK_THROWS_AS(RootTable(1, Direction::kForward), InvalidArgument);
  CHECK_THROWS_AS(RootTable(12, Direction::kForward), InvalidArgument);
  CHECK(is_power_of_two(1024));
  CHECK_FALSE(is_power_of_two(0));
  CHECK(log2_exact(4096) == 12);
  CHECK_THROWS_AS(log2_exact(6), InvalidArgument);
}

TEST_CASE("fft small examples") {
  const RootTable roots(4, Direction::kForward);
  check_close(fft_pencil(make({1, 0, 0, 0}), roots).values(), {1, 1, 1, 1});
  check_close(fft_pencil(make({1, 1, 1, 1}), roots).values(), {4, 0, 0, 0});
  check_close(fft_pencil(make({0, 1, 0, 0}), roots).values(), {{1, 0}, {0, -1}, {-1, 0}, {0, 1}});
  // Same answer from the independent DFT.
  const auto want = oracle::dft({0, 1, 0, 0});
  CHECK(std::abs(want[1] - ComplexD(0, -1)) < 1e-12);
}

TEST_CASE("ifft small examples") {
  const RootTable fwd(4, Direction::kForward);
  const RootTable inv(4, Direction::kInverse);
  check_close(ifft_pencil(make({4, 0, 0, 0}), inv).values(), {1, 1, 1, 1});
  check_close(ifft_pencil(fft_pencil(make({1, 0, 0, 0}), fwd), inv).values(), {1, 0, 0, 0});
}

TEST_CASE("fft matches the direct DFT for every size up to 1024") {
  for (std::size_t n = 2; n <= 1024; n *= 2) {
    CAPTURE(n);
    const RootTable roots(n, Direction::kForward);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto x = oracle::random_complex(n, seed * 977 + n);
      const Pencil y = fft_pencil(Pencil(x), roots);
      CHECK(oracle::rel_l2(oracle::values(y.values()), oracle::dft(oracle::widen(x))) < 1e-5);
    }
  }
}

TEST_CASE("inverse matches the direct inverse DFT") {
  for (std::size_t n : {2u, 16u, 256u}) {
    const auto x = oracle::random_complex(n, 5);
    const Pencil y = ifft_pencil(Pencil(x), RootTable(n, Direction::kInverse));
    CHECK(oracle::rel_l2(oracle::values(y.values()), oracle::dft(oracle::widen(x), true)) < 1e-5);
  }
}

TEST_CASE("round trip for every size up to 4096") {
  for (std::size_t n = 2; n <= 4096; n *= 2) {
    CAPTURE(n);
    const auto x = oracle::random_complex(n, n);
    const Pencil back = ifft_pencil(fft_pencil(Pencil(x), RootTable(n, Direction::kForward)),
                                    RootTable(n, Direction::kInverse));
    CHECK(oracle::rel_l2(oracle::values(back.values()), oracle::widen(x)) < 1e-5);
  }
}

TEST_CASE("linearity, Parseval, impulse and constant") {
  for (std::size_t n : {8u, 128u, 2048u}) {
    CAPTURE(n);
    const RootTable roots(n, Direction::kForward);
    const auto x = oracle::random_complex(n, 11);
    const auto y = oracle::random_complex(n, 12);
    const Complex alpha(0.75f, -0.5f), beta(-1.25f, 0.25f);
    std::vector<Complex> mix(n);
    for (std::size_t i = 0; i < n; ++i) mix[i] = alpha * x[i] + beta * y[i];
    const auto fx = fft_pencil(Pencil(x), roots);
    const auto fy = fft_pencil(Pencil(y), roots);
    const auto fm = fft_pencil(Pencil(mix), roots);
    std::vector<ComplexD> combo(n);
    for (std::size_t i = 0; i < n; ++i) combo[i] = ComplexD(alpha * fx.values()[i] + beta * fy.values()[i]);
    CHECK(oracle::rel_l2(oracle::values(fm.values()), combo) < 1e-5);

    double ex = 0, eX = 0;
    for (const auto& v : x) ex += std::norm(ComplexD(v));
    for (const auto& v : fx.values()) eX += std::norm(ComplexD(v));
    CHECK(std::abs(eX - static_cast<double>(n) * ex) / (static_cast<double>(n) * ex) < 1e-5);

    std::vector<Complex> impulse(n), ones(n, Complex(1, 0));
    impulse[0] = 1;
    const auto fi = fft_pencil(Pencil(impulse), roots);
    const auto fo = fft_pencil(Pencil(ones), roots);
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(std::abs(fi.values()[k] - Complex(1, 0)) < 1e-5f);
      const Complex want = k == 0 ? Complex(static_cast<float>(n), 0) : Complex(0, 0);
      CHECK(std::abs(fo.values()[k] - want) < 1e-5f * static_cast<float>(n));
    }
  }
}

TEST_CASE("dft_reference examples") {
  const std::vector<ComplexD> one{{2.5, -1}};
  CHECK(dft_reference(one, Direction::kForward)[0] == one[0]);
  const std::vector<ComplexD> two{{3, 1}, {1, -2}};
  const auto d2 = dft_reference(two, Direction::kForward);
  CHECK(std::abs(d2[0] - ComplexD(4, -1)) < 1e-12);
  CHECK(std::abs(d2[1] - ComplexD(2, 3)) < 1e-12);
  // Non-power-of-two sizes are fine for the reference.
  const auto x5 = oracle::widen(oracle::random_complex(5, 3));
  const auto d5 = dft_reference(x5, Direction::kForward);
  const auto o5 = oracle::dft(x5);
  for (std::size_t k = 0; k < 5; ++k) CHECK(std::abs(d5[k] - o5[k]) < 1e-12);

  const auto x8 = oracle::widen(oracle::random_complex(8, 4));
  const auto X8 = dft_reference(x8, Direction::kForward);
  double ex = 0, eX = 0;
  for (const auto& v : x8) ex += std::norm(v);
  for (const auto& v : X8) eX += std::norm(v);
  CHECK(std::abs(eX - 8 * ex) / (8 * ex) < 1e-9);
}

TEST_CASE("pencil transforms reject bad input") {
  const RootTable fwd(8, Direction::kForward);
  const RootTable inv(8, Direction::kInverse);
  CHECK_THROWS_AS(fft_pencil(Pencil(16), fwd), InvalidArgument);
  CHECK_THROWS_AS(fft_pencil(Pencil(8), inv), InvalidArgument);
  CHECK_THROWS_AS(ifft_pencil(Pencil(8), fwd), InvalidArgument);
  std::vector<Complex> bad(8);
  bad[3] = Complex(std::numeric_limits<float>::quiet_NaN(), 0);
  CHECK_THROWS_AS(fft_pencil(Pencil(bad), fwd), NonFiniteInput);
  bad[3] = Complex(0, std::numeric_limits<float>::infinity());
  CHECK_THROWS_AS(fft_pencil(Pencil(bad), fwd), NonFiniteInput);
  const std::vector<ComplexD> nan_d{{std::nan(""), 0}};
  CHECK_THROWS_AS(dft_reference(nan_d, Direction::kForward), NonFiniteInput);
}

TEST_CASE("a negated twiddle is caught by the oracle") {
  RootTable roots(16, Direction::kForward);
  roots.inject_fault(1);
  const auto x = oracle::random_complex(16, 9);
  const Pencil y = fft_pencil(Pencil(x), roots);
  CHECK(oracle::rel_l2(oracle::values(y.values()), oracle::dft(oracle::widen(x))) > 1e-2);
  CHECK_THROWS_AS(roots.inject_fault(8), InvalidArgument);
}
