#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "meshfft/bench.hpp"
#include "meshfft/errors.hpp"
#include "meshfft/fabric.hpp"
#include "meshfft/pipeline.hpp"

namespace meshfft::bench {

namespace {

constexpr double kTolerance = 1e-5;
constexpr double kDesTolerance = 0.02;

std::vector<ComplexD> widen(std::span<const Complex> v) { return {v.begin(), v.end()}; }

// Separable reference: 1D double-precision DFTs along z, then y, then x of a
// canonical grid.
std::vector<ComplexD> dft3_reference(const Grid3& grid, Direction direction) {
  const std::size_t n = grid.n();
  std::vector<ComplexD> a = widen(grid.canonical().values());
  std::vector<ComplexD> line(n);
  const std::size_t strides[3] = {n * n, n, 1};
  for (std::size_t axis = 0; axis < 3; ++axis) {
    const std::size_t stride = strides[axis];
    for (std::size_t base = 0; base < n * n * n; ++base) {
      if ((base / stride) % n != 0) continue;  // only line starts
      for (std::size_t k = 0; k < n; ++k) line[k] = a[base + k * stride];
      const auto out = dft_reference(line, direction);
      for (std::size_t k = 0; k < n; ++k) a[base + k * stride] = out[k];
    }
  }
  return a;
}

std::vector<ComplexD> dft2_reference(const Grid2& grid, Direction direction) {
  const std::size_t n = grid.n();
  std::vector<ComplexD> a = widen(grid.canonical().values());
  std::vector<ComplexD> line(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) line[v] = a[u * n + v];
    const auto out = dft_reference(line, direction);
    for (std::size_t v = 0; v < n; ++v) a[u * n + v] = out[v];
  }
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t u = 0; u < n; ++u) line[u] = a[u * n + v];
    const auto out = dft_reference(line, direction);
    for (std::size_t u = 0; u < n; ++u) a[u * n + v] = out[u];
  }
  return a;
}

double energy(std::span<const Complex> v) {
  double e = 0;
  for (const auto& x : v) e += std::norm(ComplexD(x));
  return e;
}

std::vector<std::size_t> mesh_edges(std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t p = 1; p <= n; p *= 2) out.push_back(p);
  return out;
}

FftJobSpec job_for(int dims, std::size_t n, std::size_t p, Direction direction = Direction::kForward) {
  FftJobSpec job;
  job.dims = dims;
  job.n = n;
  job.p = p;
  job.direction = direction;
  job.timing = TimingMode::kNone;
  return job;
}

bool feasible(int dims, std::size_t n, std::size_t p) {
  try {
    job_for(dims, n, p).validate();
    return true;
  } catch (const Infeasible&) {
    return false;
  }
}

SuiteResult finish(std::string suite, std::size_t n, double worst, double tolerance, std::string detail) {
  SuiteResult r{std::move(suite), n, worst <= tolerance, worst, std::move(detail)};
  if (!r.passed) r.detail += fmt::format("; violated: error {:.3g} > {:.0e}", worst, tolerance);
  return r;
}

SuiteResult oracle_1d(const ValidateConfig& config, std::size_t n) {
  RootTable roots(n, Direction::kForward);
  if (config.inject_root_fault) roots.inject_fault(roots.entries().size() > 1 ? 1 : 0);
  double worst = 0;
  for (int t = 0; t < config.trials; ++t) {
    Pencil x(random_values(n, config.seed + static_cast<std::uint64_t>(t)));
    std::vector<Complex> scratch(n);
    Pencil y = x;
    transform_pencil(y.values(), scratch, roots);
    worst = std::max(worst, relative_l2_error(std::span<const Complex>(y.values()),
                                              dft_reference(widen(x.values()), Direction::kForward)));
  }
  return finish("oracle-1d", n, worst, kTolerance, fmt::format("{} random pencils vs direct DFT", config.trials));
}

SuiteResult oracle_3d(const ValidateConfig& config, std::size_t n) {
  const Grid3 input = random_grid(n, config.seed);
  const auto want = dft3_reference(input, Direction::kForward);
  double worst = 0;
  std::size_t meshes = 0;
  for (std::size_t p : mesh_edges(n)) {
    if (!feasible(3, n, p)) continue;
    const auto got = run_fft(job_for(3, n, p), input).output.canonical();
    worst = std::max(worst, relative_l2_error(got.values(), want));
    ++meshes;
  }
  return finish("oracle-3d", n, worst, kTolerance, fmt::format("{} mesh sizes vs separable DFT", meshes));
}

SuiteResult oracle_2d(const ValidateConfig& config, std::size_t n) {
  const Grid2 input(n, random_values(n * n, config.seed));
  const auto want = dft2_reference(input, Direction::kForward);
  double worst = 0;
  for (std::size_t p : mesh_edges(n)) {
    const auto got = run_fft2d(job_for(2, n, p), input).output;
    worst = std::max(worst, relative_l2_error(got.values(), want));
  }
  return finish("oracle-2d", n, worst, kTolerance, "all PE counts vs separable DFT");
}

SuiteResult round_trip(const ValidateConfig& config, std::size_t n) {
  double worst = 0;
  const RootTable fwd(n, Direction::kForward);
  const RootTable inv(n, Direction::kInverse);
  const Pencil x(random_values(n, config.seed));
  const Pencil back = ifft_pencil(fft_pencil(x, fwd), inv);
  worst = relative_l2_error(std::span<const Complex>(back.values()), widen(x.values()));

  const Grid3 input = random_grid(n, config.seed + 1);
  const auto want = widen(input.values());
  for (std::size_t p : mesh_edges(n)) {
    if (!feasible(3, n, p)) continue;
    const auto forward = run_fft(job_for(3, n, p), input).output;
    const auto back3 = run_ifft(job_for(3, n, p, Direction::kInverse), forward).output;
    worst = std::max(worst, relative_l2_error(back3.values(), want));
  }
  return finish("round-trip", n, worst, kTolerance, "1D and 3D ifft(fft(x)) vs x");
}

SuiteResult parseval(const ValidateConfig& config, std::size_t n) {
  const double nd = static_cast<double>(n);
  const Pencil x(random_values(n, config.seed + 2));
  const Pencil y = fft_pencil(x, RootTable(n, Direction::kForward));
  double worst = std::abs(energy(y.values()) - nd * energy(x.values())) / (nd * energy(x.values()));

  const Grid3 input = random_grid(n, config.seed + 3);
  const auto out = run_fft(job_for(3, n, feasible(3, n, n) ? n : n / 2), input).output;
  const double ein = nd * nd * nd * energy(input.values());
  worst = std::max(worst, std::abs(energy(out.values()) - ein) / ein);
  return finish("parseval", n, worst, kTolerance, "1D and 3D energy ratio");
}

// Logical content must survive an exchange (only the orientation changes),
// a second exchange must restore the blocks, and the simulated broadcast
// must deliver the same data as the direct movement.
SuiteResult transpose_involution(const ValidateConfig& config) {
  int cases = 0;
  std::string failure;
  for (std::size_t p : {2u, 4u, 8u, 16u}) {
    for (std::size_t m : {1u, 2u}) {
      const std::size_t n = p * m;
      const MeshShape mesh = MeshShape::for_problem(n, p);
      const FabricParams params = FabricParams::for_precision(Precision::kFp32);
      const TransposePlan plan = build_transpose_plan(p, m, params);
      const Grid3 input = random_grid(n, config.seed + p * 31 + m);
      for (const auto& [axis, slot] : {std::pair{MeshAxis::kX, std::size_t{0}}, std::pair{MeshAxis::kY, std::size_t{1}}}) {
        ++cases;
        const auto original = distribute(input, mesh);
        auto blocks = original;
        redistribute(blocks, mesh, axis, plan);
        const AxisOrder swapped = AxisOrder::canonical().swapped(slot, 2);
        if (!(gather(blocks, mesh, swapped).canonical() == input)) {
          failure = fmt::format("p={} m={}: exchange lost logical content", p, m);
        }
        auto simulated = original;
        DesOptions options;
        options.event_budget = config.event_budget;
        simulate_full_redistribution(simulated, mesh, axis, plan, params, options);
        for (std::size_t b = 0; b < blocks.size(); ++b) {
          if (simulated[b].data != blocks[b].data) failure = fmt::format("p={} m={}: broadcast differs from direct", p, m);
        }
        redistribute(blocks, mesh, axis, plan);
        for (std::size_t b = 0; b < blocks.size(); ++b) {
          if (blocks[b].data != original[b].data) failure = fmt::format("p={} m={}: not an involution", p, m);
        }
      }
    }
  }
  SuiteResult r{"transpose-involution", 0, failure.empty(), failure.empty() ? 0.0 : 1.0,
                fmt::format("{} line exchanges", cases)};
  if (!r.passed) r.detail += "; violated: " + failure;
  return r;
}

SuiteResult des_vs_model(const ValidateConfig& config) {
  double worst = 0;
  int cases = 0;
  for (std::size_t p : {2u, 4u, 8u, 16u}) {
    for (std::size_t m : {1u, 2u}) {
      for (Precision precision : {Precision::kFp16, Precision::kFp32}) {
        const FabricParams params = FabricParams::for_precision(precision);
        DesOptions options;
        options.event_budget = config.event_budget;
        const auto des = simulate_row_transpose(build_transpose_plan(p, m, params), params, options);
        const double model = static_cast<double>(transpose_cycles(p * m, m, params.cycles_per_complex, params.reconfig_delay));
        worst = std::max(worst, std::abs(static_cast<double>(des.total_cycles) - model) / model);
        ++cases;
      }
    }
  }
  return finish("des-vs-model", 0, worst, kDesTolerance, fmt::format("{} (p, m, r) cases", cases));
}

}  // namespace

bool ValidateReport::passed() const {
  return !results.empty() && std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

std::string ValidateReport::text() const {
  std::string out;
  for (const auto& r : results) {
    const std::string size = r.n ? fmt::format(" n={}", r.n) : "";
    out += fmt::format("{} {}{} max_error={:.3e} {}\n", r.passed ? "PASS" : "FAIL", r.suite, size, r.max_error, r.detail);
  }
  out += passed() ? "all suites passed\n" : "validation FAILED\n";
  return out;
}

ValidateReport cmd_validate(const ValidateConfig& config) {
  if (config.sizes.empty()) throw InvalidArgument("no sizes to validate");
  for (std::size_t n : config.sizes) {
    if (n < 2 || !is_power_of_two(n)) throw InvalidArgument(fmt::format("size {} must be a power of two >= 2", n));
    if (n > 64) throw InvalidArgument(fmt::format("size {} exceeds the functional cap of 64", n));
  }
  ValidateReport report;
  for (std::size_t n : config.sizes) {
    report.results.push_back(oracle_1d(config, n));
    report.results.push_back(oracle_3d(config, n));
    report.results.push_back(oracle_2d(config, n));
    report.results.push_back(round_trip(config, n));
    report.results.push_back(parseval(config, n));
  }
  report.results.push_back(transpose_involution(config));
  report.results.push_back(des_vs_model(config));
  return report;
}

}  // namespace meshfft::bench
