#include <doctest.h>

#include <algorithm>

#include <sstream>

#include "coalsim/config.hpp"
#include "coalsim/metrics.hpp"
#include "coalsim/system.hpp"
#include "support/oracles.hpp"

using namespace coalsim;
using namespace coalsim::testing;

TEST_CASE("coalesce rate formula") {
  MetricsLedger l;
  l.elem_width = 8;

  l.narrow_served = 4;
  l.wide_element_accesses = 2;
  CHECK(coalesce_rate(l) == doctest::Approx(0.25));  // 32 / 128

  l.narrow_served = 1;
  l.wide_element_accesses = 1;
  CHECK(coalesce_rate(l) == doctest::Approx(0.125));  // the no-coalescer rate

  l.narrow_served = 8;
  l.wide_element_accesses = 1;
  CHECK(coalesce_rate(l) == doctest::Approx(1.0));  // full duplicate reuse

  l.wide_element_accesses = 0;
  CHECK_FALSE(coalesce_rate(l).has_value());
}

TEST_CASE("indirect bandwidth: bytes per cycle is GB/s at 1 GHz") {
  MetricsLedger l;
  l.elem_width = 8;
  l.narrow_served = 1000;
  l.cycles = 1000;
  CHECK(indirect_bandwidth_gbps(l) == doctest::Approx(8.0));
  l.narrow_served = 0;
  CHECK(indirect_bandwidth_gbps(l) == doctest::Approx(0.0));
  // Effective bandwidth is uncapped: under reuse it may exceed the 32 GB/s
  // channel peak.
  l.narrow_served = 5000;
  CHECK(indirect_bandwidth_gbps(l) == doctest::Approx(40.0));
}

TEST_CASE("utilization and traffic ratio") {
  MetricsLedger l;
  l.cycles = 500;
  l.channel_busy_cycles = 500;
  CHECK(channel_utilization(l) == doctest::Approx(1.0));

  l.bytes = {0, 0, 4096, 0};
  CHECK(traffic_ratio(l, 4096) == doctest::Approx(1.0));  // compulsory only
  CHECK(traffic_ratio(l, 2048) == doctest::Approx(2.0));
}

TEST_CASE("csv rows follow the fixed schema") {
  RunReport r;
  r.matrix = "m.mtx";
  r.format = "sell";
  r.variant = "mlp";
  r.window = 256;
  r.mode = "stream";
  r.ledger.cycles = 100;
  r.ledger.bytes = {64, 128, 0, 0};
  r.ledger.narrow_served = 16;
  r.ledger.wide_element_accesses = 2;
  r.ledger.channel_busy_cycles = 6;
  r.ideal_bytes = 128;
  r.derive();
  CHECK(csv_row(3, r) ==
        "3,m.mtx,sell,mlp,256,100,64,128,0,0,16,2,1.28,1,0.06,1.5");

  std::string err = csv_error_row(4, "x.mtx", "csr", "mlp", 64, "no, file");
  CHECK(err == "4,x.mtx,csr,mlp,64,error:no; file,,,,,,,,,,");
  // error rows keep the 16-column shape
  CHECK(std::count(err.begin(), err.end(), ',') == 15);
}

TEST_CASE("config: defaults and overrides") {
  std::istringstream in(
      "[adapter]\n"
      "window = 64\n"
      "ports = 2\n"
      "[dram]\n"
      "t_row_hit = 10\n"
      "[vps]\n"
      "l2_bytes = 98304\n");
  SimConfig c = sim_config_from(parse_config(in));
  CHECK(c.coal.window == 64);
  CHECK(c.coal.n_ports == 2);
  CHECK(c.coal.hitmap_queue_depth == 128);
  CHECK(c.coal.effective_offsets_depth() == 2048 / 64);
  CHECK(c.dram.t_row_hit == 10);
  CHECK(c.dram.t_row_miss == 44);
  CHECK(c.vps.tile_bytes() == 16384);
  CHECK(c.tile_nnz() == 2048);
  CHECK(c.llc.capacity == 1ull << 20);

  std::istringstream bad("[adapter]\nwindow = lots\n");
  CHECK_THROWS(sim_config_from(parse_config(bad)));

  std::istringstream defaults(default_config_text());
  SimConfig d = sim_config_from(parse_config(defaults));
  CHECK(d.coal.window == 256);
  CHECK(d.vps.l2_bytes == 384 * 1024);
}

TEST_CASE("config: sweep grid is the cartesian product in order") {
  std::istringstream in(
      "[runs]\n"
      "matrices = a.mtx b.mtx\n"
      "variants = mlpnc mlp seq\n");
  auto runs = sweep_runs_from(parse_config(in));
  REQUIRE(runs.size() == 6);
  CHECK(runs[0].matrix == "a.mtx");
  CHECK(runs[0].variant == "mlpnc");
  CHECK(runs[0].format == "sell");
  CHECK(runs[0].window == 256);
  CHECK(runs[0].mode == "stream");
  CHECK(runs[3].matrix == "b.mtx");
  CHECK(runs[5].variant == "seq");
}

TEST_CASE("ledger closure and event-log cross-checks on a real run") {
  SellMatrix sell = csr_to_sell(coo_to_csr(gen_stencil27(6, 6, 6)), 32);
  SimConfig cfg;
  Workload wl = make_workload(sell, "s666", cfg.tile_nnz());
  std::vector<WideEvent> events;
  RunReport rep = stream_run(wl, cfg, CoalMode::MLP, &events);

  std::uint64_t elem_events = 0, index_events = 0, pops = 0;
  for (const auto& e : events) {
    if (e.category == Category::ELEMENT) {
      ++elem_events;
      pops += e.popcount;
    } else {
      ++index_events;
    }
  }
  CHECK(elem_events == rep.ledger.wide_element_accesses);
  CHECK(pops == rep.ledger.narrow_served);
  CHECK(rep.ledger.narrow_served == wl.packed_count());
  CHECK(rep.ledger.bytes[static_cast<int>(Category::ELEMENT)] ==
        elem_events * kBlockBytes);
  CHECK(rep.ledger.bytes[static_cast<int>(Category::INDEX)] ==
        index_events * kBlockBytes);
  CHECK(rep.ledger.bytes[static_cast<int>(Category::CONTIG)] == 0);
  CHECK(rep.ledger.bytes[static_cast<int>(Category::RESULT)] == 0);
  CHECK(rep.ledger.total_bytes() ==
        rep.ledger.bytes[0] + rep.ledger.bytes[1] + rep.ledger.bytes[2] +
            rep.ledger.bytes[3]);
}

TEST_CASE("stream rerun is deterministic down to the report") {
  SellMatrix sell = csr_to_sell(coo_to_csr(gen_stencil27(5, 5, 5)), 32);
  SimConfig cfg;
  Workload wl = make_workload(sell, "s555", cfg.tile_nnz());
  RunReport a = stream_run(wl, cfg, CoalMode::SEQ);
  RunReport b = stream_run(wl, cfg, CoalMode::SEQ);
  CHECK(csv_row(0, a) == csv_row(0, b));
}

TEST_CASE("mlpnc coalesce rate is exactly one eighth") {
  SellMatrix sell = csr_to_sell(coo_to_csr(gen_stencil27(4, 4, 4)), 32);
  SimConfig cfg;
  Workload wl = make_workload(sell, "s444", cfg.tile_nnz());
  RunReport rep = stream_run(wl, cfg, CoalMode::MLPNC);
  REQUIRE(rep.rate.has_value());
  CHECK(*rep.rate == doctest::Approx(0.125));
  CHECK(rep.ledger.wide_element_accesses == wl.packed_count());
}
