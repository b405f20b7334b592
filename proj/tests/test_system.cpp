#include <doctest.h>

#include <cmath>

#include "coalsim/llc.hpp"
#include "coalsim/system.hpp"
#include "support/oracles.hpp"

using namespace coalsim;
using namespace coalsim::testing;

namespace {

SimConfig small_system() {
  SimConfig c;
  c.vps.l2_bytes = 6 * 8192;  // 1024-entry tiles keep small runs multi-tile
  return c;
}

void check_y(const std::vector<double>& got, const std::vector<double>& ref) {
  REQUIRE(got.size() == ref.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    double denom = std::abs(ref[i]) > 1e-300 ? std::abs(ref[i]) : 1.0;
    CHECK(std::abs(got[i] - ref[i]) / denom <= 1e-12);
  }
}

}  // namespace

TEST_CASE("compute model formula") {
  VpsConfig v;
  CHECK(compute_model(1600, 1, v) == 110);
  CHECK(compute_model(0, 5, v) == 0);
  CHECK(compute_model(33, 2, v) == 23);
}

TEST_CASE("llc: repeated access misses once then hits") {
  Llc llc(LlcConfig{});
  CHECK_FALSE(llc.access(0x1234, false).hit);
  for (int i = 0; i < 10; ++i) CHECK(llc.access(0x1234, false).hit);
  CHECK(llc.misses() == 1);
  CHECK(llc.hits() == 10);
}

TEST_CASE("llc: nine lines thrash an eight-way set") {
  LlcConfig cfg;
  Llc llc(cfg);
  std::uint64_t set_stride = static_cast<std::uint64_t>(llc.sets()) * cfg.line;
  for (int round = 0; round < 4; ++round)
    for (int i = 0; i < 9; ++i)
      CHECK_FALSE(llc.access(i * set_stride, false).hit);
}

TEST_CASE("llc: clean evictions write nothing back, dirty ones do") {
  LlcConfig cfg;
  Llc llc(cfg);
  std::uint64_t set_stride = static_cast<std::uint64_t>(llc.sets()) * cfg.line;
  for (int i = 0; i < 8; ++i) llc.access(i * set_stride, false);
  Llc::Result r = llc.access(8 * set_stride, false);  // evicts clean LRU
  CHECK_FALSE(r.writeback);

  llc.access(9 * set_stride, true);                    // dirty fill
  for (int i = 0; i < 8; ++i) llc.access(i * set_stride, false);
  CHECK(llc.writebacks() == 1);
}

TEST_CASE("system run: result equals the dense oracle, both formats") {
  CooMatrix coo = gen_stencil27(5, 4, 3);
  CsrMatrix csr = coo_to_csr(coo);
  SimConfig cfg = small_system();

  Workload wl_csr = make_workload(csr, "stencil543", cfg.tile_nnz());
  RunReport rep = system_run(wl_csr, cfg, CoalMode::MLP);
  check_y(rep.y, spmv_reference(csr, wl_csr.x));

  SellMatrix sell = csr_to_sell(csr, 32);
  Workload wl_sell = make_workload(sell, "stencil543", cfg.tile_nnz(), &wl_csr.x);
  RunReport rep2 = system_run(wl_sell, cfg, CoalMode::MLP);
  check_y(rep2.y, spmv_reference(csr, wl_csr.x));
}

TEST_CASE("system run: identical runs produce identical reports") {
  CsrMatrix csr = coo_to_csr(gen_stencil27(4, 4, 4));
  SimConfig cfg = small_system();
  Workload wl = make_workload(csr, "s444", cfg.tile_nnz());
  RunReport a = system_run(wl, cfg, CoalMode::MLP);
  RunReport b = system_run(wl, cfg, CoalMode::MLP);
  CHECK(a.ledger.cycles == b.ledger.cycles);
  CHECK(a.ledger.bytes == b.ledger.bytes);
  CHECK(a.indirect_cycles == b.indirect_cycles);
  CHECK(a.y == b.y);
}

TEST_CASE("system run: double buffering overlaps but never exceeds two tiles") {
  SellMatrix sell = csr_to_sell(coo_to_csr(gen_stencil27(8, 8, 8)), 32);
  SimConfig cfg = small_system();
  Workload wl = make_workload(sell, "s888", cfg.tile_nnz());
  RunReport rep = system_run(wl, cfg, CoalMode::MLP);
  REQUIRE(rep.tiles.size() >= 3);

  bool any_overlap = false;
  for (std::size_t t = 0; t < rep.tiles.size(); ++t) {
    const TilePhase& p = rep.tiles[t];
    CHECK(p.compute_start >= p.transfer_end);
    if (t + 1 < rep.tiles.size()) {
      // tile t+1's transfer may overlap tile t's compute but two transfers
      // never overlap each other
      CHECK(rep.tiles[t + 1].transfer_start >= p.transfer_end);
      any_overlap |= rep.tiles[t + 1].transfer_start < p.compute_end;
    }
    if (t + 2 < rep.tiles.size())
      CHECK(rep.tiles[t + 2].transfer_start >= p.compute_end);
  }
  CHECK(any_overlap);
}

TEST_CASE("system run: element traffic never undercuts compulsory blocks") {
  SellMatrix sell = csr_to_sell(coo_to_csr(gen_stencil27(7, 7, 7)), 32);
  SimConfig cfg = small_system();
  Workload wl = make_workload(sell, "s777", cfg.tile_nnz());
  std::uint64_t floor_bytes =
      distinct_gather_blocks(wl.packed_idx, wl.map.x_base, kValueBytes) *
      kBlockBytes;
  for (CoalMode mode : {CoalMode::MLPNC, CoalMode::MLP, CoalMode::SEQ}) {
    RunReport rep = system_run(wl, cfg, mode);
    CHECK(rep.ledger.bytes[static_cast<int>(Category::ELEMENT)] >= floor_bytes);
  }
}

TEST_CASE("system run: a bigger window is at least as fast on the gather") {
  SellMatrix sell = csr_to_sell(coo_to_csr(gen_stencil27(8, 8, 8)), 32);
  SimConfig cfg = small_system();
  Workload wl = make_workload(sell, "s888", cfg.tile_nnz());

  SimConfig c64 = cfg;
  c64.coal.window = 64;
  SimConfig c256 = cfg;
  c256.coal.window = 256;
  RunReport pack0 = system_run(wl, cfg, CoalMode::MLPNC);
  RunReport pack64 = system_run(wl, c64, CoalMode::MLP);
  RunReport pack256 = system_run(wl, c256, CoalMode::MLP);
  CHECK(pack256.indirect_cycles <= pack64.indirect_cycles);
  CHECK(pack64.indirect_cycles <= pack0.indirect_cycles);
  CHECK(pack256.ledger.cycles < pack0.ledger.cycles);
}

TEST_CASE("baseline: result matches the oracle and traffic closes") {
  CsrMatrix csr = coo_to_csr(gen_stencil27(4, 4, 2));
  SimConfig cfg = small_system();
  Workload wl = make_workload(csr, "s442", cfg.tile_nnz());
  RunReport rep = baseline_run(wl, cfg);
  check_y(rep.y, spmv_reference(csr, wl.x));
  CHECK(rep.ledger.total_bytes() ==
        rep.ledger.bytes[0] + rep.ledger.bytes[1] + rep.ledger.bytes[2] +
            rep.ledger.bytes[3]);
  CHECK(rep.ledger.cycles > 0);
}

TEST_CASE("baseline: second pass of a cache-resident problem is element-free") {
  // 6x6x6 stencil: all arrays fit in the 1 MiB LLC.
  CsrMatrix csr = coo_to_csr(gen_stencil27(6, 6, 6));
  SimConfig cfg = small_system();
  Workload wl = make_workload(csr, "s666", cfg.tile_nnz());
  RunReport rep = baseline_run(wl, cfg, 2);
  REQUIRE(rep.pass_bytes.size() == 2);
  CHECK(rep.pass_bytes[0][static_cast<int>(Category::ELEMENT)] > 0);
  CHECK(rep.pass_bytes[1][static_cast<int>(Category::ELEMENT)] == 0);
}

TEST_CASE("baseline is slower than even the coalescer-less pack system") {
  SellMatrix sell = csr_to_sell(coo_to_csr(gen_stencil27(6, 6, 6)), 32);
  CsrMatrix csr = coo_to_csr(gen_stencil27(6, 6, 6));
  SimConfig cfg = small_system();
  Workload wl_sell = make_workload(sell, "s666", cfg.tile_nnz());
  Workload wl_csr = make_workload(csr, "s666", cfg.tile_nnz());
  RunReport pack0 = system_run(wl_sell, cfg, CoalMode::MLPNC);
  RunReport base = baseline_run(wl_csr, cfg);
  CHECK(base.ledger.cycles > pack0.ledger.cycles);
}
