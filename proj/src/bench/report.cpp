#include <fstream>
#include <random>

#include <fmt/format.h>
#include <json.hpp>

#include "meshfft/bench.hpp"
#include "meshfft/errors.hpp"

namespace meshfft::bench {

std::string_view to_string(Source source) {
  switch (source) {
    case Source::kMeasuredTable: return "measured-table";
    case Source::kAnalytic: return "analytic";
    case Source::kDes: return "des";
    case Source::kEstimate: return "estimate";
    case Source::kPaperCited: return "paper-cited";
  }
  return "unknown";
}

Format parse_format(std::string_view text) {
  if (text == "csv") return Format::kCsv;
  if (text == "json") return Format::kJson;
  throw InvalidArgument(fmt::format("unknown format '{}' (expected csv or json)", text));
}

const std::vector<std::string_view>& report_columns() {
  static const std::vector<std::string_view> columns{
      "n",       "p",     "m",         "profile", "compute_cycles", "comm_cycles", "total_cycles", "cycles_per_n2",
      "seconds", "tflops", "bandwidth_bytes_per_s", "source", "note"};
  return columns;
}

namespace {

// %.17g would leak binary noise into reports; 10 significant digits keep
// every cycle count exact and are stable across runs.
std::string num(double v) { return fmt::format("{:.10g}", v); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string meta_line(const ReportMeta& meta) {
  return fmt::format("# command={} seed={} clock_hz={} d={}\n", meta.command, meta.seed, num(meta.clock_hz),
                     meta.reconfig_delay);
}

nlohmann::ordered_json meta_json(const ReportMeta& meta) {
  nlohmann::ordered_json j;
  j["command"] = meta.command;
  j["seed"] = meta.seed;
  j["clock_hz"] = meta.clock_hz;
  j["d"] = meta.reconfig_delay;
  return j;
}

}  // namespace

std::string to_csv(const Report& report) {
  std::string out = meta_line(report.meta);
  const auto& cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += fmt::format("{}{}", i ? "," : "", cols[i]);
  out += '\n';
  for (const auto& r : report.rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.n, r.p, r.m, to_string(r.precision),
                       num(r.compute_cycles), num(r.comm_cycles), num(r.total_cycles), num(r.cycles_per_n2),
                       num(r.seconds), num(r.tflops), num(r.bandwidth_bytes_per_s), to_string(r.source),
                       csv_field(r.note));
  }
  return out;
}

std::string to_json(const Report& report) {
  nlohmann::ordered_json j;
  j["meta"] = meta_json(report.meta);
  j["columns"] = report_columns();
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json row;
    row["n"] = r.n;
    row["p"] = r.p;
    row["m"] = r.m;
    row["profile"] = to_string(r.precision);
    row["compute_cycles"] = r.compute_cycles;
    row["comm_cycles"] = r.comm_cycles;
    row["total_cycles"] = r.total_cycles;
    row["cycles_per_n2"] = r.cycles_per_n2;
    row["seconds"] = r.seconds;
    row["tflops"] = r.tflops;
    row["bandwidth_bytes_per_s"] = r.bandwidth_bytes_per_s;
    row["source"] = to_string(r.source);
    row["note"] = r.note;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string render(const Report& report, Format format) {
  return format == Format::kCsv ? to_csv(report) : to_json(report);
}

std::string compare_to_csv(const std::vector<CompareRow>& rows, const ReportMeta& meta) {
  std::string out = meta_line(meta);
  out += "n,precision_bits,system,tflops,source,note\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{}\n", r.n, r.precision_bits, csv_field(r.system), num(r.tflops),
                       to_string(r.source), csv_field(r.note));
  }
  return out;
}

std::string compare_to_json(const std::vector<CompareRow>& rows, const ReportMeta& meta) {
  nlohmann::ordered_json j;
  j["meta"] = meta_json(meta);
  j["columns"] = {"n", "precision_bits", "system", "tflops", "source", "note"};
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json row;
    row["n"] = r.n;
    row["precision_bits"] = r.precision_bits;
    row["system"] = r.system;
    row["tflops"] = r.tflops;
    row["source"] = to_string(r.source);
    row["note"] = r.note;
    arr.push_back(std::move(row));
  }
  j["rows"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::filesystem::path write_report(const std::filesystem::path& dir, std::string_view stem, const std::string& body,
                                   Format format) {
  std::filesystem::create_directories(dir);
  auto path = dir / fmt::format("{}.{}", stem, format == Format::kCsv ? "csv" : "json");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  out << body;
  return path;
}

std::vector<Complex> random_values(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> uniform(-1.0f, 1.0f);
  std::vector<Complex> out(count);
  for (auto& v : out) {
    const float re = uniform(rng);
    const float im = uniform(rng);
    v = Complex(re, im);
  }
  return out;
}

Grid3 random_grid(std::size_t n, std::uint64_t seed) { return Grid3(n, random_values(n * n * n, seed)); }

}  // namespace meshfft::bench
