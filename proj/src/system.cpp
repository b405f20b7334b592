#include "coalsim/system.hpp"

#include <algorithm>
#include <cstring>

#include "coalsim/dram.hpp"
#include "coalsim/isu.hpp"
#include "coalsim/llc.hpp"

namespace coalsim {

namespace {

double splitmix_unit(std::uint64_t i) {
  std::uint64_t z = i + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

std::vector<std::uint8_t> as_bytes(const std::vector<index_t>& v) {
  std::vector<std::uint8_t> out(v.size() * sizeof(index_t));
  std::memcpy(out.data(), v.data(), out.size());
  return out;
}

std::vector<std::uint8_t> as_bytes(const std::vector<double>& v) {
  std::vector<std::uint8_t> out(v.size() * sizeof(double));
  std::memcpy(out.data(), v.data(), out.size());
  return out;
}

std::uint64_t span_blocks(addr_t base, std::uint64_t bytes) {
  if (bytes == 0) return 0;
  return (align_up(base + bytes, kBlockBytes) - align_down(base, kBlockBytes)) /
         kBlockBytes;
}

double bits_to_double(std::uint64_t bits) {
  double d;
  std::memcpy(&d, &bits, sizeof d);
  return d;
}

// Aborts when the pipeline stops making forward progress; a hang would
// otherwise be indistinguishable from a long run.
struct ProgressWatch {
  std::uint64_t last_stat = ~0ull;
  cycle_t last_cycle = 0;
  void observe(std::uint64_t stat, cycle_t cycle) {
    if (stat != last_stat) {
      last_stat = stat;
      last_cycle = cycle;
    }
    COALSIM_CHECK(cycle - last_cycle < 500000);
  }
};

}  // namespace

std::vector<double> default_x(index_t cols) {
  std::vector<double> x(cols);
  for (index_t i = 0; i < cols; ++i) x[i] = splitmix_unit(i) - 0.5;
  return x;
}

Workload make_workload(const CsrMatrix& m, const std::string& name,
                       std::uint64_t tile_nnz, const std::vector<double>* x) {
  Workload wl;
  wl.matrix_name = name;
  wl.format = "csr";
  wl.rows = m.rows;
  wl.cols = m.cols;
  wl.map = layout_csr(m);
  wl.packed_idx = m.col_idx;
  wl.packed_val = m.values;
  wl.packed_row = csr_packed_rows(m);
  wl.ptr_entries = m.row_ptr;
  wl.x = x ? *x : default_x(m.cols);
  wl.tiles = spmv_streams(m, wl.map, tile_nnz);
  wl.real_nnz = m.nnz();
  return wl;
}

Workload make_workload(const SellMatrix& m, const std::string& name,
                       std::uint64_t tile_nnz, const std::vector<double>* x) {
  Workload wl;
  wl.matrix_name = name;
  wl.format = "sell";
  wl.rows = m.rows;
  wl.cols = m.cols;
  wl.map = layout_sell(m);
  wl.packed_idx = m.col_idx;
  wl.packed_val = m.values;
  wl.packed_row = sell_packed_rows(m);
  wl.ptr_entries.reserve(m.slice_ptr.size());
  for (std::uint64_t p : m.slice_ptr)
    wl.ptr_entries.push_back(static_cast<index_t>(p));
  wl.x = x ? *x : default_x(m.cols);
  wl.tiles = spmv_streams(m, wl.map, tile_nnz);
  wl.real_nnz = m.packed_size() - m.pad_count();
  return wl;
}

void load_dram_image(DramChannel& dram, const Workload& wl) {
  dram.load_image(wl.map.ptr_base, as_bytes(wl.ptr_entries));
  dram.load_image(wl.map.idx_base, as_bytes(wl.packed_idx));
  dram.load_image(wl.map.val_base, as_bytes(wl.packed_val));
  dram.load_image(wl.map.x_base, as_bytes(wl.x));
}

std::uint64_t ideal_bytes_stream(const Workload& wl) {
  return span_blocks(wl.map.idx_base, wl.map.idx_bytes) * kBlockBytes +
         distinct_gather_blocks(wl.packed_idx, wl.map.x_base, kValueBytes) *
             kBlockBytes;
}

std::uint64_t ideal_bytes_system(const Workload& wl) {
  return ideal_bytes_stream(wl) +
         (span_blocks(wl.map.ptr_base, wl.map.ptr_bytes) +
          span_blocks(wl.map.val_base, wl.map.val_bytes) +
          span_blocks(wl.map.y_base, wl.map.y_bytes)) *
             kBlockBytes;
}

cycle_t compute_model(std::uint64_t packed_entries, unsigned strips,
                      const VpsConfig& vps) {
  if (packed_entries == 0) return 0;
  return (packed_entries + vps.lanes - 1) / vps.lanes +
         vps.per_slice_overhead * strips;
}

namespace {

MetricsLedger make_ledger(cycle_t cycles, const DramChannel& dram,
                          std::uint64_t narrow_served,
                          std::uint64_t wide_elem) {
  MetricsLedger l;
  l.cycles = cycles;
  for (int c = 0; c < kNumCategories; ++c)
    l.bytes[c] = dram.bytes_moved(static_cast<Category>(c));
  l.narrow_served = narrow_served;
  l.wide_element_accesses = wide_elem;
  l.channel_busy_cycles = dram.busy_cycles();
  return l;
}

void verify_gather(const Workload& wl, const std::vector<std::uint64_t>& got,
                   std::uint64_t first_entry) {
  for (std::size_t k = 0; k < got.size(); ++k) {
    double expect = wl.x[wl.packed_idx[first_entry + k]];
    COALSIM_CHECK(bits_to_double(got[k]) == expect);
  }
}

}  // namespace

RunReport stream_run(const Workload& wl, const SimConfig& cfg, CoalMode mode,
                     std::vector<WideEvent>* events) {
  SimConfig c = cfg;
  c.coal.mode = mode;
  c.coal.elem_width = kValueBytes;
  c.isu.n_ports = c.coal.n_ports;

  DramChannel dram(c.dram);
  load_dram_image(dram, wl);
  PackAdapter adapter(c.isu, c.coal);
  adapter.set_event_log(events);

  IndirectBurst burst;
  burst.index_base = wl.map.idx_base;
  burst.elem_base = wl.map.x_base;
  burst.length = wl.packed_count();
  adapter.start_burst(burst);

  cycle_t cycle = 0;
  ProgressWatch watch;
  while (adapter.busy() || !dram.idle()) {
    adapter.step(cycle, dram);
    dram.step(cycle);
    watch.observe(dram.accesses() + adapter.coalescer().delivered() +
                      adapter.stats().narrow_requests,
                  cycle);
    ++cycle;
  }

  verify_gather(wl, adapter.gathered(), 0);
  COALSIM_CHECK(adapter.coalescer().meta_popcount_total() == wl.packed_count());

  RunReport r;
  r.matrix = wl.matrix_name;
  r.format = wl.format;
  r.variant = coal_mode_name(mode);
  r.window = c.coal.window;
  r.ports = c.coal.n_ports;
  r.mode = "stream";
  r.ledger = make_ledger(cycle, dram, adapter.coalescer().meta_popcount_total(),
                         adapter.coalescer().wide_issued());
  r.indirect_cycles = cycle;
  r.ideal_bytes = ideal_bytes_stream(wl);
  r.derive();
  return r;
}

namespace {

std::vector<addr_t> burst_blocks(const ContiguousBurst& b) {
  std::vector<addr_t> out;
  for (addr_t a = align_down(b.base, kBlockBytes); a < b.base + b.length_bytes;
       a += kBlockBytes)
    out.push_back(a);
  return out;
}

struct TileRt {
  std::vector<addr_t> blocks;  // contiguous fetches (pointer + value streams)
  std::size_t next_block = 0;
  std::uint64_t outstanding = 0;
  std::vector<double> values;
  std::vector<std::uint64_t> gathered;
  bool transfer_done = false;
  bool compute_done = false;
  bool burst_timed = false;
  TilePhase phase;
};

}  // namespace

RunReport system_run(const Workload& wl, const SimConfig& cfg, CoalMode mode,
                     std::vector<WideEvent>* events) {
  SimConfig c = cfg;
  c.coal.mode = mode;
  c.coal.elem_width = kValueBytes;
  c.isu.n_ports = c.coal.n_ports;

  DramChannel dram(c.dram);
  load_dram_image(dram, wl);
  PackAdapter adapter(c.isu, c.coal);
  adapter.set_event_log(events);

  std::vector<TileRt> rt(wl.tiles.size());
  for (std::size_t t = 0; t < wl.tiles.size(); ++t) {
    rt[t].blocks = burst_blocks(wl.tiles[t].ptr_burst);
    auto vb = burst_blocks(wl.tiles[t].val_burst);
    rt[t].blocks.insert(rt[t].blocks.end(), vb.begin(), vb.end());
    rt[t].values.assign(wl.tiles[t].entry_count, 0.0);
  }

  std::vector<double> y(wl.rows, 0.0);
  std::vector<addr_t> result_writes;
  std::size_t next_result = 0;

  std::size_t transfer_tile = 0;    // next tile to start transferring
  std::size_t active = rt.size();   // currently transferring tile
  std::size_t compute_tile = 0;     // next tile to compute
  bool computing = false;
  cycle_t compute_end = 0;
  cycle_t indirect_cycles = 0;
  cycle_t burst_start = 0;

  cycle_t cycle = 0;
  ProgressWatch watch;
  unsigned rr = 0;  // 0 adapter, 1 contig, 2 result

  auto all_done = [&] {
    return compute_tile == rt.size() && next_result == result_writes.size() &&
           dram.idle() && !adapter.busy();
  };

  while (!all_done()) {
    // Contiguous responses feed the active tile's value buffer.
    if (dram.response_ready(Category::CONTIG, cycle)) {
      WideResponse resp = dram.pop_response(Category::CONTIG, cycle);
      COALSIM_CHECK(active < rt.size());
      TileRt& tr = rt[active];
      const TileStreams& ts = wl.tiles[active];
      addr_t vlo = ts.val_burst.base;
      addr_t vhi = vlo + ts.val_burst.length_bytes;
      addr_t lo = std::max(resp.addr, vlo);
      addr_t hi = std::min(resp.addr + kBlockBytes, vhi);
      if (lo < hi)
        std::memcpy(reinterpret_cast<std::uint8_t*>(tr.values.data()) + (lo - vlo),
                    resp.data.data() + (lo - resp.addr), hi - lo);
      COALSIM_CHECK(tr.outstanding > 0);
      --tr.outstanding;
    }

    adapter.step(cycle, dram, /*auto_submit=*/false);

    // Start the next tile transfer once the adapter is free and the L2
    // buffer pair has been released (double buffering: at most the current
    // and the previous tile's data live in L2).
    if (active == rt.size() && transfer_tile < rt.size() && !adapter.busy()) {
      unsigned depth = c.vps.outstanding_prefetches;
      bool buffer_free = transfer_tile < depth ||
                         rt[transfer_tile - depth].compute_done;
      if (buffer_free) {
        active = transfer_tile++;
        rt[active].phase.transfer_start = cycle;
        burst_start = cycle;
        adapter.start_burst(wl.tiles[active].gather);
      }
    }

    if (active < rt.size()) {
      TileRt& tr = rt[active];
      if (!tr.burst_timed && !adapter.busy()) {
        indirect_cycles += cycle - burst_start;
        tr.gathered = adapter.take_gathered();
        tr.burst_timed = true;
      }
      if (tr.burst_timed && tr.next_block == tr.blocks.size() &&
          tr.outstanding == 0) {
        tr.transfer_done = true;
        tr.phase.transfer_end = cycle;
        active = rt.size();
      }
    }

    // Compute engine: strictly in tile order, overlapped with transfers.
    if (!computing && compute_tile < rt.size() && rt[compute_tile].transfer_done) {
      const TileStreams& ts = wl.tiles[compute_tile];
      rt[compute_tile].phase.compute_start = cycle;
      compute_end = cycle + compute_model(ts.entry_count, ts.strip_count, c.vps);
      computing = true;
    }
    if (computing && cycle >= compute_end) {
      TileRt& tr = rt[compute_tile];
      const TileStreams& ts = wl.tiles[compute_tile];
      tr.phase.compute_end = cycle;
      for (std::uint64_t k = 0; k < ts.entry_count; ++k) {
        index_t row = wl.packed_row[ts.first_entry + k];
        if (row < wl.rows)
          y[row] += tr.values[k] * bits_to_double(tr.gathered[k]);
      }
      tr.gathered.clear();
      tr.gathered.shrink_to_fit();
      addr_t ylo = wl.map.y_base + static_cast<addr_t>(ts.first_row) * kValueBytes;
      addr_t yhi = ylo + static_cast<addr_t>(ts.row_count) * kValueBytes;
      for (addr_t a = align_down(ylo, kBlockBytes); a < yhi; a += kBlockBytes)
        result_writes.push_back(a);
      tr.compute_done = true;
      ++compute_tile;
      computing = false;
    }

    // One request port: round-robin between the adapter's traffic, the
    // contiguous prefetch stream, and result write-back.
    for (unsigned k = 0; k < 3; ++k) {
      unsigned who = (rr + k) % 3;
      bool submitted = false;
      if (who == 0) {
        submitted = adapter.try_submit(cycle, dram);
      } else if (who == 1 && active < rt.size() &&
                 rt[active].next_block < rt[active].blocks.size()) {
        WideRequest req{rt[active].blocks[rt[active].next_block],
                        Category::CONTIG, cycle, false};
        if ((submitted = dram.submit(req, cycle))) {
          ++rt[active].next_block;
          ++rt[active].outstanding;
        }
      } else if (who == 2 && next_result < result_writes.size()) {
        WideRequest req{result_writes[next_result], Category::RESULT, cycle,
                        true};
        if ((submitted = dram.submit(req, cycle))) ++next_result;
      }
      if (submitted) {
        rr = (who + 1) % 3;
        break;
      }
    }

    dram.step(cycle);
    watch.observe(dram.accesses() + adapter.coalescer().delivered() +
                      compute_tile + next_result,
                  cycle);
    ++cycle;
  }

  RunReport r;
  r.matrix = wl.matrix_name;
  r.format = wl.format;
  r.variant = coal_mode_name(mode);
  r.window = c.coal.window;
  r.ports = c.coal.n_ports;
  r.mode = "system";
  r.ledger = make_ledger(cycle, dram, adapter.coalescer().meta_popcount_total(),
                         adapter.coalescer().wide_issued());
  r.indirect_cycles = indirect_cycles;
  r.ideal_bytes = ideal_bytes_system(wl);
  r.tiles.reserve(rt.size());
  for (const TileRt& t : rt) r.tiles.push_back(t.phase);
  r.y = std::move(y);
  r.derive();
  return r;
}

// ---------------------------------------------------------------------------
// Baseline: naive SpMV through the LLC, coupled access and compute.

namespace {

struct BaselineDriver {
  DramChannel& dram;
  Llc& llc;
  cycle_t cycle = 0;
  std::uint64_t outstanding = 0;
  Category outstanding_cat = Category::ELEMENT;

  void advance() {
    dram.step(cycle);
    if (outstanding > 0 && dram.response_ready(outstanding_cat, cycle)) {
      dram.pop_response(outstanding_cat, cycle);
      --outstanding;
    }
    ++cycle;
  }

  void submit_blocking(const WideRequest& req) {
    while (!dram.submit(req, cycle)) advance();
    advance();  // the port is consumed for this cycle
  }

  // One lanes-wide batch of accesses to `lines`, blocking on the slowest.
  void batch(const std::vector<addr_t>& lines, Category cat, bool write) {
    cycle_t start = cycle;
    bool any = false;
    for (addr_t line : lines) {
      Llc::Result res = llc.access(line, write);
      if (res.writeback)
        submit_blocking({block_of(res.writeback_addr), Category::RESULT,
                         cycle, true});
      if (!res.hit) {
        submit_blocking({block_of(line), cat, cycle, false});
        ++outstanding;
        outstanding_cat = cat;
      }
      any = true;
    }
    while (outstanding > 0) advance();
    if (any && cycle < start + llc.config().hit_latency)
      while (cycle < start + llc.config().hit_latency) advance();
  }
};

std::vector<addr_t> lines_of(addr_t lo, addr_t hi) {
  std::vector<addr_t> out;
  for (addr_t a = align_down(lo, kBlockBytes); a < hi; a += kBlockBytes)
    out.push_back(a);
  return out;
}

}  // namespace

RunReport baseline_run(const Workload& wl, const SimConfig& cfg,
                       unsigned passes) {
  COALSIM_CHECK(wl.format == "csr");  // the baseline runs the naive row loop
  COALSIM_CHECK(cfg.llc.line == kBlockBytes);
  COALSIM_CHECK(passes >= 1);

  DramChannel dram(cfg.dram);
  load_dram_image(dram, wl);
  Llc llc(cfg.llc);
  BaselineDriver drv{dram, llc};

  std::vector<double> y(wl.rows, 0.0);
  cycle_t indirect_cycles = 0;
  std::uint64_t gathers = 0;
  RunReport r;

  // Row offsets reconstructed from the packed row ids.
  std::vector<std::uint64_t> row_start(wl.rows + 1, 0);
  for (index_t row : wl.packed_row) row_start[row + 1]++;
  for (index_t i = 0; i < wl.rows; ++i) row_start[i + 1] += row_start[i];

  std::array<std::uint64_t, kNumCategories> prev_bytes{};
  for (unsigned pass = 0; pass < passes; ++pass) {
    if (pass > 0) std::fill(y.begin(), y.end(), 0.0);
    for (index_t row = 0; row < wl.rows; ++row) {
      drv.cycle += cfg.vps.per_slice_overhead;  // strip-mining overhead
      std::uint64_t k0 = row_start[row];
      std::uint64_t k1 = row_start[row + 1];

      addr_t plo = wl.map.ptr_base + static_cast<addr_t>(row) * kIndexBytes;
      drv.batch(lines_of(plo, plo + 2 * kIndexBytes), Category::CONTIG, false);

      for (std::uint64_t k = k0; k < k1; k += cfg.vps.lanes) {
        std::uint64_t ke = std::min<std::uint64_t>(k + cfg.vps.lanes, k1);

        cycle_t t0 = drv.cycle;
        drv.batch(lines_of(wl.map.idx_base + k * kIndexBytes,
                           wl.map.idx_base + ke * kIndexBytes),
                  Category::INDEX, false);
        indirect_cycles += drv.cycle - t0;

        drv.batch(lines_of(wl.map.val_base + k * kValueBytes,
                           wl.map.val_base + ke * kValueBytes),
                  Category::CONTIG, false);

        std::vector<addr_t> gather_lines;
        for (std::uint64_t j = k; j < ke; ++j)
          gather_lines.push_back(block_of(
              wl.map.x_base +
              static_cast<addr_t>(wl.packed_idx[j]) * kValueBytes));
        std::sort(gather_lines.begin(), gather_lines.end());
        gather_lines.erase(
            std::unique(gather_lines.begin(), gather_lines.end()),
            gather_lines.end());
        t0 = drv.cycle;
        drv.batch(gather_lines, Category::ELEMENT, false);
        indirect_cycles += drv.cycle - t0;
        gathers += ke - k;

        for (std::uint64_t j = k; j < ke; ++j)
          y[row] += wl.packed_val[j] * wl.x[wl.packed_idx[j]];
        drv.cycle += 1;  // VMAC
      }

      addr_t ya = wl.map.y_base + static_cast<addr_t>(row) * kValueBytes;
      drv.batch({block_of(ya)}, Category::RESULT, true);
    }

    std::array<std::uint64_t, kNumCategories> now{};
    for (int c = 0; c < kNumCategories; ++c)
      now[c] = dram.bytes_moved(static_cast<Category>(c)) - prev_bytes[c];
    prev_bytes = {dram.bytes_moved(Category::INDEX),
                  dram.bytes_moved(Category::ELEMENT),
                  dram.bytes_moved(Category::CONTIG),
                  dram.bytes_moved(Category::RESULT)};
    r.pass_bytes.push_back(now);
  }

  for (addr_t line : llc.drain_dirty())
    drv.submit_blocking({block_of(line), Category::RESULT, drv.cycle, true});
  while (!dram.idle()) drv.advance();

  r.matrix = wl.matrix_name;
  r.format = wl.format;
  r.variant = "base";
  r.window = 0;
  r.ports = cfg.vps.lanes;
  r.mode = "system";
  r.ledger = make_ledger(drv.cycle, dram, gathers,
                         dram.bytes_moved(Category::ELEMENT) / kBlockBytes);
  r.indirect_cycles = indirect_cycles;
  r.ideal_bytes = ideal_bytes_system(wl);
  r.y = std::move(y);
  r.derive();
  return r;
}

}  // namespace coalsim
