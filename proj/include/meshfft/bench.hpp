#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "meshfft/analytic.hpp"
#include "meshfft/layout.hpp"
#include "meshfft/pipeline.hpp"
#include "meshfft/precision.hpp"

namespace meshfft::bench {

enum class Source { kMeasuredTable, kAnalytic, kDes, kEstimate, kPaperCited };

std::string_view to_string(Source source);

struct ReportRow {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t m = 0;
  Precision precision = Precision::kFp32;
  double compute_cycles = 0;
  double comm_cycles = 0;
  double total_cycles = 0;
  double cycles_per_n2 = 0;
  double seconds = 0;
  double tflops = 0;
  double bandwidth_bytes_per_s = 0;
  Source source = Source::kAnalytic;
  std::string note;
};

struct ReportMeta {
  std::string command;
  std::uint64_t seed = 0;
  double clock_hz = kDefaultClockHz;
  std::int64_t reconfig_delay = kDefaultReconfigDelay;
};

struct Report {
  ReportMeta meta;
  std::vector<ReportRow> rows;
};

enum class Format { kCsv, kJson };

Format parse_format(std::string_view text);

// Fixed column order shared by CSV and JSON.
const std::vector<std::string_view>& report_columns();

std::string to_csv(const Report& report);
std::string to_json(const Report& report);
std::string render(const Report& report, Format format);

// Writes `<dir>/<stem>.csv|json`; returns the path written.
std::filesystem::path write_report(const std::filesystem::path& dir, std::string_view stem, const std::string& body,
                                   Format format);

struct ExperimentConfig {
  std::vector<std::size_t> sizes{32, 64, 128, 256, 512};
  std::vector<Precision> precisions{Precision::kFp16, Precision::kFp32};
  double clock_hz = kDefaultClockHz;
  std::int64_t reconfig_delay = kDefaultReconfigDelay;
  std::uint64_t seed = 42;
  TimingMode timing = TimingMode::kAnalytic;  // kDes adds simulated-comm rows where the budget allows
  std::int64_t event_budget = 100'000'000;
};

// One pencil per PE on n×n meshes: measured rows, model rows (with the gap
// annotated) and, for n beyond the measured table, doubling estimates.
Report cmd_weak_scaling(const ExperimentConfig& config);

// Meshes below n×n from the measured single-pencil split.
struct StrongLadder {
  std::size_t n;
  std::vector<std::size_t> meshes;  // p values, ascending
};
const std::vector<StrongLadder>& default_strong_ladders();
Report cmd_strong_scaling(const ExperimentConfig& config, const std::vector<StrongLadder>& ladders = default_strong_ladders());

struct CompareRow {
  std::size_t n = 0;
  int precision_bits = 0;
  std::string system;
  double tflops = 0;
  Source source = Source::kPaperCited;
  std::string note;
};

std::vector<CompareRow> cmd_compare(const ExperimentConfig& config);
std::string compare_to_csv(const std::vector<CompareRow>& rows, const ReportMeta& meta);
std::string compare_to_json(const std::vector<CompareRow>& rows, const ReportMeta& meta);

struct ModelArgs {
  std::size_t n = 512;
  std::size_t m = 1;
  Precision precision = Precision::kFp32;
  std::int64_t reconfig_delay = kDefaultReconfigDelay;
  double clock_hz = kDefaultClockHz;
  bool host_transfer = false;
  bool bisection_2d = false;
};

struct ModelOutput {
  PhaseBreakdown breakdown;
  ThroughputReport throughput;
  double bandwidth_bytes_per_s = 0;
  double host_transfer_seconds = 0;  // both directions, when requested
  double bisection_cycles = 0;       // when requested
  std::string text;
};

ModelOutput cmd_model(const ModelArgs& args);

struct ValidateConfig {
  std::vector<std::size_t> sizes{4, 8, 16, 32};
  std::uint64_t seed = 42;
  int trials = 3;
  bool inject_root_fault = false;  // test hook: negates one twiddle
  std::int64_t event_budget = 100'000'000;
};

struct SuiteResult {
  std::string suite;
  std::size_t n = 0;  // 0 when not size-specific
  bool passed = false;
  double max_error = 0;
  std::string detail;
};

struct ValidateReport {
  std::vector<SuiteResult> results;
  bool passed() const;
  std::string text() const;
};

ValidateReport cmd_validate(const ValidateConfig& config);

// Seeded uniform samples in [−1, 1] for both components.
std::vector<Complex> random_values(std::size_t count, std::uint64_t seed);
Grid3 random_grid(std::size_t n, std::uint64_t seed);

}  // namespace meshfft::bench
