#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "meshfft/bench.hpp"
#include "meshfft/errors.hpp"
#include "meshfft/grid_io.hpp"
#include "meshfft/pipeline.hpp"

namespace {

using namespace meshfft;

constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

struct CommonFlags {
  std::string profile;  // empty: both, where a sweep allows it
  std::int64_t d = kDefaultReconfigDelay;
  double clock_hz = kDefaultClockHz;
  std::string timing = "analytic";
  std::string out;
  std::string format = "csv";
  std::uint64_t seed = 42;
  std::int64_t event_budget = 100'000'000;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool report_out = true) {
  cmd->add_option("--profile", f.profile, "fp16 or fp32")->check(CLI::IsMember({"fp16", "fp32"}));
  cmd->add_option("--d", f.d, "router reconfiguration delay in cycles")->check(CLI::NonNegativeNumber);
  cmd->add_option("--clock-hz", f.clock_hz, "core clock")->check(CLI::PositiveNumber);
  cmd->add_option("--timing", f.timing, "none, analytic or des")->check(CLI::IsMember({"none", "analytic", "des"}));
  if (report_out) cmd->add_option("--out", f.out, "output directory (default: stdout)");
  cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", f.seed, "seed for random inputs");
  cmd->add_option("--event-budget", f.event_budget, "simulation event cap")->check(CLI::PositiveNumber);
}

TimingMode parse_timing(const std::string& s) {
  if (s == "none") return TimingMode::kNone;
  if (s == "des") return TimingMode::kDes;
  return TimingMode::kAnalytic;
}

bench::ExperimentConfig experiment(const CommonFlags& f) {
  bench::ExperimentConfig c;
  if (!f.profile.empty()) c.precisions = {parse_precision(f.profile)};
  c.clock_hz = f.clock_hz;
  c.reconfig_delay = f.d;
  c.seed = f.seed;
  c.timing = parse_timing(f.timing);
  c.event_budget = f.event_budget;
  return c;
}

void emit(const CommonFlags& f, std::string_view stem, const std::string& body) {
  if (f.out.empty()) {
    std::cout << body;
    return;
  }
  const auto path = bench::write_report(f.out, stem, body, bench::parse_format(f.format));
  std::cerr << "wrote " << path.string() << "\n";
}

int run_fft3d(const CommonFlags& f, std::size_t n, std::size_t p, bool inverse, const std::string& in,
              const std::string& out, bool random, bool allow_large, unsigned workers) {
  Grid3 grid;
  if (random) {
    if (n == 0) throw InvalidArgument("--random needs --n");
    grid = bench::random_grid(n, f.seed);
  } else {
    if (in.empty()) throw InvalidArgument("fft3d needs --in FILE or --random");
    grid = read_grid(in);
    if (n != 0 && n != grid.n()) throw InvalidArgument(fmt::format("--n {} does not match file n={}", n, grid.n()));
    n = grid.n();
  }
  if (n > 64 && !allow_large) throw InvalidArgument(fmt::format("n={} exceeds the functional cap of 64; pass --allow-large", n));

  FftJobSpec job;
  job.n = n;
  job.p = p == 0 ? n : p;
  job.precision = f.profile.empty() ? Precision::kFp32 : parse_precision(f.profile);
  job.direction = inverse ? Direction::kInverse : Direction::kForward;
  job.timing = parse_timing(f.timing);
  job.reconfig_delay = f.d;
  job.clock_hz = f.clock_hz;
  job.event_budget = f.event_budget;
  job.workers = workers;

  const FftResult result = inverse ? run_ifft(job, grid) : run_fft(job, grid);
  if (!out.empty()) write_grid(out, result.output);
  const auto& b = result.breakdown;
  std::cout << fmt::format("n={} p={} m={} profile={} direction={} output_order={}\n", n, job.p, job.m(),
                           to_string(job.precision), inverse ? "inverse" : "forward",
                           out.empty() ? result.output.order().to_string() : "xyz");
  if (job.timing != TimingMode::kNone) {
    std::cout << fmt::format("compute_cycles={:.10g} comm_cycles={:.10g} total_cycles={:.10g} timing={}\n", b.rt_cmpt,
                             b.rt_comm, b.total_cycles, f.timing);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pencil-decomposed 3D FFT on a simulated 2D mesh of processing elements"};
  app.require_subcommand(1);

  CommonFlags flags;

  auto* validate = app.add_subcommand("validate", "run correctness suites");
  std::vector<std::size_t> validate_sizes{4, 8, 16, 32};
  std::string inject_fault;
  validate->add_option("--sizes", validate_sizes, "pencil/grid sizes")->delimiter(',');
  validate->add_option("--inject-fault", inject_fault)->group("")->check(CLI::IsMember({"root-sign"}));
  add_common(validate, flags);

  auto* weak = app.add_subcommand("weak-scaling", "one pencil per PE, n = 32..512");
  std::vector<std::size_t> weak_sizes{32, 64, 128, 256, 512};
  weak->add_option("--sizes", weak_sizes, "grid sizes")->delimiter(',');
  add_common(weak, flags);

  auto* strong = app.add_subcommand("strong-scaling", "fixed n over the mesh ladder");
  std::size_t strong_n = 0;
  strong->add_option("--n", strong_n, "only this ladder (256, 512 or 1024)");
  add_common(strong, flags);

  auto* model = app.add_subcommand("model", "closed-form cycle model for one configuration");
  bench::ModelArgs model_args;
  std::size_t model_p = 0;
  model->add_option("--n", model_args.n, "grid edge")->required();
  model->add_option("--p", model_p, "mesh edge (default n)");
  model->add_flag("--host-transfer", model_args.host_transfer, "host I/O time for the grid");
  model->add_flag("--bisection-2d", model_args.bisection_2d, "bisection lower bound for an n² transpose");
  add_common(model, flags);

  auto* compare = app.add_subcommand("compare", "reported systems next to computed rows");
  add_common(compare, flags);

  auto* fft3d = app.add_subcommand("fft3d", "transform a grid file");
  std::size_t fft_n = 0, fft_p = 0;
  std::string fft_in, fft_out;
  bool fft_random = false, fft_inverse = false, allow_large = false;
  unsigned workers = 1;
  fft3d->add_option("--n", fft_n, "grid edge (with --random)");
  fft3d->add_option("--p", fft_p, "mesh edge (default n)");
  fft3d->add_option("--in", fft_in, "raw grid file; sidecar at <file>.json");
  fft3d->add_option("--out", fft_out, "raw grid file to write");
  fft3d->add_flag("--random", fft_random, "seeded uniform input");
  fft3d->add_flag("--inverse", fft_inverse, "inverse transform");
  fft3d->add_flag("--allow-large", allow_large, "lift the n <= 64 cap");
  fft3d->add_option("--workers", workers, "threads per superstep")->check(CLI::PositiveNumber);
  add_common(fft3d, flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (validate->parsed()) {
      bench::ValidateConfig c;
      c.sizes = validate_sizes;
      c.seed = flags.seed;
      c.inject_root_fault = inject_fault == "root-sign";
      c.event_budget = flags.event_budget;
      const auto report = bench::cmd_validate(c);
      std::cout << report.text();
      return report.passed() ? 0 : kExitValidation;
    }
    if (weak->parsed()) {
      auto c = experiment(flags);
      c.sizes = weak_sizes;
      emit(flags, "weak_scaling", bench::render(bench::cmd_weak_scaling(c), bench::parse_format(flags.format)));
      return 0;
    }
    if (strong->parsed()) {
      std::vector<bench::StrongLadder> ladders;
      for (const auto& l : bench::default_strong_ladders()) {
        if (strong_n == 0 || l.n == strong_n) ladders.push_back(l);
      }
      if (ladders.empty()) throw InvalidArgument(fmt::format("no mesh ladder for n={}", strong_n));
      emit(flags, "strong_scaling",
           bench::render(bench::cmd_strong_scaling(experiment(flags), ladders), bench::parse_format(flags.format)));
      return 0;
    }
    if (model->parsed()) {
      if (!flags.profile.empty()) model_args.precision = parse_precision(flags.profile);
      model_args.reconfig_delay = flags.d;
      model_args.clock_hz = flags.clock_hz;
      const std::size_t p = model_p == 0 ? model_args.n : model_p;
      model_args.m = MeshShape::for_problem(model_args.n, p).m;
      std::cout << bench::cmd_model(model_args).text;
      return 0;
    }
    if (compare->parsed()) {
      const auto c = experiment(flags);
      const auto rows = bench::cmd_compare(c);
      const bench::ReportMeta meta{"compare", c.seed, c.clock_hz, c.reconfig_delay};
      emit(flags, "compare",
           flags.format == "json" ? bench::compare_to_json(rows, meta) : bench::compare_to_csv(rows, meta));
      return 0;
    }
    if (fft3d->parsed()) {
      return run_fft3d(flags, fft_n, fft_p, fft_inverse, fft_in, fft_out, fft_random, allow_large, workers);
    }
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const Infeasible& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}
