#include <doctest.h>

#include <sstream>

#include "meshfft/errors.hpp"
#include "meshfft/fabric.hpp"
#include "oracle.hpp"

using namespace meshfft;

namespace {

const FabricParams kFp16 = FabricParams::for_precision(Precision::kFp16);
const FabricParams kFp32 = FabricParams::for_precision(Precision::kFp32);

// Closed form for one line, written out independently of the library.
std::int64_t eq1(std::int64_t n, std::int64_t m, std::int64_t r, std::int64_t d = 30) {
  return (n * n * m * r) / 2 - (n * m * m * r) / 2 + d * (n / m - 1);
}

// p PEs holding consecutive rows of an n×n matrix, m rows each.
struct Matrix2 {
  std::size_t n, m, p;
  std::vector<Complex> data;
  std::vector<std::span<Complex>> buffers() {
    std::vector<std::span<Complex>> out;
    for (std::size_t pe = 0; pe < p; ++pe) out.push_back(std::span<Complex>(data).subspan(pe * m * n, m * n));
    return out;
  }
  std::vector<Complex> transposed() const {
    std::vector<Complex> t(n * n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) t[c * n + r] = data[r * n + c];
    return t;
  }
};

Matrix2 random_matrix(std::size_t p, std::size_t m, std::uint64_t seed) {
  const std::size_t n = p * m;
  return {n, m, p, oracle::random_complex(n * n, seed)};
}

}  // namespace

TEST_CASE("fabric parameters") {
  CHECK(kFp16.cycles_per_complex == 1);
  CHECK(kFp32.cycles_per_complex == 2);
  CHECK(kFp32.reconfig_delay == 30);
  CHECK(kFp32.link_width_bits == 32);
  FabricParams bad = kFp32;
  bad.cycles_per_complex = 3;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = kFp32;
  bad.reconfig_delay = -1;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("plan message counts") {
  for (std::size_t p : {2u, 4u, 8u, 32u}) {
    for (std::size_t m : {1u, 2u, 4u}) {
      const auto plan = build_transpose_plan(p, m, kFp32);
      const std::int64_t cube = static_cast<std::int64_t>(m * m * m);
      CHECK(plan.message_elements == cube);
      for (std::size_t i = 0; i < p; ++i) {
        CHECK(plan.elements_sent(StreamDir::kEast, i) == static_cast<std::int64_t>(p - 1 - i) * cube);
        CHECK(plan.elements_sent(StreamDir::kWest, i) == static_cast<std::int64_t>(i) * cube);
      }
      CHECK(plan.colors <= kFabricColors);
      CHECK_NOTHROW(check_transpose_plan(plan));
    }
  }
}

TEST_CASE("plan examples") {
  const auto p2 = build_transpose_plan(2, 1, kFp16);
  CHECK(p2.elements_sent(StreamDir::kEast, 0) == 1);
  CHECK(p2.elements_sent(StreamDir::kWest, 1) == 1);
  // Each receiver captures a single window, nothing passes through.
  CHECK(p2.filters[dir_index(StreamDir::kEast)][1].size() == 1);

  const auto p4 = build_transpose_plan(4, 1, kFp16);
  CHECK(p4.elements_sent(StreamDir::kEast, 0) == 3);
  // Everything flowing east into PE 3 crosses link 2.
  CHECK(p4.stream_length(StreamDir::kEast) == 6);

  CHECK(build_transpose_plan(4, 2, kFp16).message_elements == 8);
  CHECK_THROWS_AS(build_transpose_plan(1, 1, kFp16), InvalidArgument);
  CHECK_THROWS_AS(build_transpose_plan(6, 1, kFp16), InvalidArgument);
}

TEST_CASE("capture windows are disjoint and cover exactly the upstream messages") {
  const auto plan = build_transpose_plan(8, 2, kFp32);
  for (StreamDir dir : {StreamDir::kEast, StreamDir::kWest}) {
    const auto d = dir_index(dir);
    std::int64_t captured = 0;
    for (std::size_t pe = 0; pe < plan.p; ++pe) {
      const auto& filters = plan.filters[d][pe];
      const std::size_t upstream = dir == StreamDir::kEast ? pe : plan.p - 1 - pe;
      CHECK(filters.size() == upstream);
      for (const auto& f : filters) {
        CHECK(f.capture_count == plan.message_elements);
        captured += f.capture_count;
      }
    }
    CHECK(captured == plan.stream_length(dir));
  }
}

TEST_CASE("corrupted plans are rejected") {
  auto plan = build_transpose_plan(4, 1, kFp32);
  plan.filters[dir_index(StreamDir::kEast)][2][0].stream_offset = plan.filters[dir_index(StreamDir::kEast)][2][1].stream_offset;
  CHECK_THROWS_AS(check_transpose_plan(plan), InvalidArgument);
  auto colors = build_transpose_plan(4, 1, kFp32);
  colors.colors = 25;
  CHECK_THROWS_AS(check_transpose_plan(colors), InvalidArgument);
  auto wrong_way = build_transpose_plan(4, 1, kFp32);
  wrong_way.sends[dir_index(StreamDir::kEast)][1][0].dest = 0;
  CHECK_THROWS_AS(check_transpose_plan(wrong_way), InvalidArgument);
}

TEST_CASE("2x2 transpose example") {
  const Complex a(1, 0), b(2, 0), c(3, 0), d(4, 0);
  Matrix2 mat{2, 1, 2, {a, b, c, d}};
  execute_transpose(mat.buffers(), build_transpose_plan(2, 1, kFp32, 1), geometry_2d(2, 1));
  CHECK(mat.data == std::vector<Complex>{a, c, b, d});
}

TEST_CASE("direct transpose matches the index-swap oracle and is an involution") {
  for (std::size_t p : {2u, 4u, 8u, 16u, 64u}) {
    for (std::size_t m : {1u, 2u, 4u}) {
      CAPTURE(p);
      CAPTURE(m);
      Matrix2 mat = random_matrix(p, m, p * 10 + m);
      const auto original = mat.data;
      const auto want = mat.transposed();
      const auto plan = build_transpose_plan(p, m, kFp32, 1);
      execute_transpose(mat.buffers(), plan, geometry_2d(p * m, m));
      CHECK(mat.data == want);
      execute_transpose(mat.buffers(), plan, geometry_2d(p * m, m));
      CHECK(mat.data == original);
    }
  }
}

TEST_CASE("3D line exchange keeps logical content") {
  for (std::size_t p : {2u, 4u, 8u}) {
    for (std::size_t m : {1u, 2u, 4u}) {
      const std::size_t n = p * m;
      const MeshShape mesh = MeshShape::for_problem(n, p);
      const Grid3 g(n, oracle::random_complex(n * n * n, n + m));
      const auto plan = build_transpose_plan(p, m, kFp32);
      for (auto [axis, slot] : {std::pair{MeshAxis::kX, std::size_t{0}}, std::pair{MeshAxis::kY, std::size_t{1}}}) {
        auto blocks = distribute(g, mesh);
        redistribute(blocks, mesh, axis, plan);
        const Grid3 out = gather(blocks, mesh, AxisOrder::canonical().swapped(slot, 2));
        CHECK(oracle::logical(out) == oracle::values(g.values()));
        redistribute(blocks, mesh, axis, plan);
        CHECK(gather(blocks, mesh) == g);
      }
    }
  }
}

TEST_CASE("shape mismatches are rejected") {
  Matrix2 mat = random_matrix(4, 1, 1);
  auto bufs = mat.buffers();
  bufs.pop_back();
  CHECK_THROWS_AS(execute_transpose(bufs, build_transpose_plan(4, 1, kFp32, 1), geometry_2d(4, 1)), InvalidArgument);
  CHECK_THROWS_AS(execute_transpose(mat.buffers(), build_transpose_plan(4, 2, kFp32, 1), geometry_2d(4, 1)),
                  InvalidArgument);
}

TEST_CASE("simulated cycles for the worked examples") {
  CHECK(simulate_row_transpose(build_transpose_plan(4, 1, kFp32), kFp32).total_cycles == 102);
  CHECK(simulate_row_transpose(build_transpose_plan(2, 1, kFp16), kFp16).total_cycles == 31);
  CHECK(simulate_row_transpose(build_transpose_plan(8, 2, kFp32), kFp32).total_cycles == 658);
}

TEST_CASE("simulation agrees with the closed form") {
  for (std::size_t p : {2u, 4u, 8u, 16u, 32u}) {
    for (std::size_t m : {1u, 2u, 4u}) {
      for (const auto& params : {kFp16, kFp32}) {
        const auto r = simulate_row_transpose(build_transpose_plan(p, m, params), params);
        const auto want = eq1(static_cast<std::int64_t>(p * m), static_cast<std::int64_t>(m), params.cycles_per_complex);
        CAPTURE(p);
        CAPTURE(m);
        CHECK(r.total_cycles == want);
      }
    }
  }
}

TEST_CASE("zero reconfiguration delay still costs one hop per switch") {
  for (std::size_t p : {2u, 4u, 16u, 64u}) {
    for (std::size_t m : {1u, 2u}) {
      FabricParams params = FabricParams::for_precision(Precision::kFp32, 0);
      const auto r = simulate_row_transpose(build_transpose_plan(p, m, params), params);
      const auto want = eq1(static_cast<std::int64_t>(p * m), static_cast<std::int64_t>(m), 2, 0) +
                        static_cast<std::int64_t>(p - 1) * params.hop_latency_cycles;
      CAPTURE(p);
      CAPTURE(m);
      CHECK(r.total_cycles == want);
    }
  }
}

TEST_CASE("other reconfiguration delays stay within tolerance") {
  for (std::int64_t d : {1, 5, 100}) {
    FabricParams params = FabricParams::for_precision(Precision::kFp32, d);
    for (std::size_t p : {4u, 16u}) {
      const auto r = simulate_row_transpose(build_transpose_plan(p, 2, params), params);
      const double want = static_cast<double>(eq1(static_cast<std::int64_t>(p * 2), 2, 2, d));
      CAPTURE(d);
      CHECK(std::abs(static_cast<double>(r.total_cycles) - want) / want < 0.02);
    }
  }
}

TEST_CASE("link loads follow the triangular count") {
  for (std::size_t p : {2u, 4u, 8u, 16u}) {
    for (std::size_t m : {1u, 2u}) {
      const auto r = simulate_row_transpose(build_transpose_plan(p, m, kFp32), kFp32);
      const std::int64_t cube = static_cast<std::int64_t>(m * m * m);
      const std::int64_t heavy = static_cast<std::int64_t>(p * (p - 1) / 2) * cube;
      CHECK(r.max_link_data_wavelets() == heavy * 2);
      // Last eastbound link and first westbound link carry the peak.
      CHECK(r.links[dir_index(StreamDir::kEast)][p - 2].data_wavelets == heavy * 2);
      CHECK(r.links[dir_index(StreamDir::kWest)][0].data_wavelets == heavy * 2);
      // Broadcast: east link k carries every eastbound message of PEs 0..k.
      for (std::size_t k = 0; k + 1 < p; ++k) {
        std::int64_t sent = 0;
        for (std::size_t i = 0; i <= k; ++i) sent += static_cast<std::int64_t>(p - 1 - i) * cube * 2;
        CHECK(r.links[dir_index(StreamDir::kEast)][k].data_wavelets == sent);
      }
      CHECK(r.total_cycles >= r.max_link_data_wavelets());
    }
  }
}

TEST_CASE("event estimate is exact and the budget is enforced") {
  const auto plan = build_transpose_plan(16, 2, kFp32);
  const auto r = simulate_row_transpose(plan, kFp32);
  CHECK(r.events == estimate_des_events(plan, kFp32));
  DesOptions tight;
  tight.event_budget = r.events - 1;
  CHECK_THROWS_AS(simulate_row_transpose(plan, kFp32, tight), BudgetExceeded);
}

TEST_CASE("simulation is deterministic") {
  const auto plan = build_transpose_plan(16, 2, kFp16);
  CHECK(simulate_row_transpose(plan, kFp16) == simulate_row_transpose(plan, kFp16));
}

TEST_CASE("fp32 at most doubles fp16 and m pencils cost at most m times one") {
  for (std::size_t n : {4u, 8u, 16u, 32u, 64u}) {
    const auto r16 = simulate_row_transpose(build_transpose_plan(n, 1, kFp16), kFp16).total_cycles;
    const auto r32 = simulate_row_transpose(build_transpose_plan(n, 1, kFp32), kFp32).total_cycles;
    CHECK(r32 <= 2 * r16);
    for (std::size_t m = 2; m < n && m <= 4; m *= 2) {
      const auto rm = simulate_row_transpose(build_transpose_plan(n / m, m, kFp32), kFp32).total_cycles;
      CHECK(rm <= static_cast<std::int64_t>(m) * r32);
    }
  }
}

TEST_CASE("functional simulation delivers the transposed data") {
  for (std::size_t p : {2u, 4u, 8u}) {
    for (std::size_t m : {1u, 2u}) {
      Matrix2 mat = random_matrix(p, m, 77 + p);
      const auto want = mat.transposed();
      const auto r = simulate_row_transpose(build_transpose_plan(p, m, kFp32, 1), kFp32, mat.buffers(),
                                            geometry_2d(p * m, m));
      CHECK(mat.data == want);
      CHECK(r.captured_elements == static_cast<std::int64_t>(p * (p - 1) * m * m));
    }
  }
}

TEST_CASE("full redistribution matches per-line execution and one-line timing") {
  const std::size_t p = 4, m = 1, n = 4;
  const MeshShape mesh = MeshShape::for_problem(n, p);
  const Grid3 g(n, oracle::random_complex(n * n * n, 5));
  const auto plan = build_transpose_plan(p, m, kFp32);
  auto simulated = distribute(g, mesh);
  auto direct = simulated;
  const auto r = simulate_full_redistribution(simulated, mesh, MeshAxis::kX, plan, kFp32);
  CHECK(r.total_cycles == 102);
  for (std::size_t line = 0; line < p; ++line) execute_transpose(direct, mesh, MeshAxis::kX, line, plan);
  for (std::size_t b = 0; b < direct.size(); ++b) CHECK(simulated[b].data == direct[b].data);

  const MeshShape small = MeshShape::for_problem(2, 2);
  const Grid3 g2(2, oracle::random_complex(8, 6));
  auto s2 = distribute(g2, small);
  auto d2 = s2;
  simulate_full_redistribution(s2, small, MeshAxis::kY, build_transpose_plan(2, 1, kFp32), kFp32);
  redistribute(d2, small, MeshAxis::kY, build_transpose_plan(2, 1, kFp32));
  for (std::size_t b = 0; b < d2.size(); ++b) CHECK(s2[b].data == d2[b].data);
}

TEST_CASE("8x8 mesh: two exchanges and their inverses restore the data") {
  const std::size_t n = 8, p = 8;
  const MeshShape mesh = MeshShape::for_problem(n, p);
  const Grid3 g(n, oracle::random_complex(n * n * n, 8));
  const auto plan = build_transpose_plan(p, 1, kFp32);
  auto blocks = distribute(g, mesh);
  simulate_full_redistribution(blocks, mesh, MeshAxis::kX, plan, kFp32);
  simulate_full_redistribution(blocks, mesh, MeshAxis::kY, plan, kFp32);
  CHECK_FALSE(gather(blocks, mesh) == g);
  simulate_full_redistribution(blocks, mesh, MeshAxis::kY, plan, kFp32);
  simulate_full_redistribution(blocks, mesh, MeshAxis::kX, plan, kFp32);
  CHECK(gather(blocks, mesh) == g);
}

TEST_CASE("trace export") {
  std::vector<TraceRecord> trace;
  DesOptions options;
  options.trace = &trace;
  const auto r = simulate_row_transpose(build_transpose_plan(2, 1, kFp16), kFp16, options);
  CHECK_FALSE(trace.empty());
  std::ostringstream out;
  write_trace_csv(out, trace);
  CHECK(out.str().rfind("cycle,dir,from,to,event\n", 0) == 0);
  for (const auto& t : trace) CHECK(t.cycle <= r.total_cycles);
}
