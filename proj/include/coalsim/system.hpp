#ifndef COALSIM_SYSTEM_HPP
#define COALSIM_SYSTEM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "coalsim/config.hpp"
#include "coalsim/metrics.hpp"
#include "coalsim/sparse.hpp"
#include "coalsim/workload.hpp"

namespace coalsim {

// A matrix prepared for simulation: packed streams, DRAM layout, tiling.
struct Workload {
  std::string matrix_name;
  std::string format;  // csr | sell
  index_t rows = 0;
  index_t cols = 0;
  AddressMap map;
  std::vector<index_t> packed_idx;
  std::vector<double> packed_val;
  std::vector<index_t> packed_row;  // rows == ghost padding lane
  std::vector<index_t> ptr_entries;
  std::vector<double> x;
  std::vector<TileStreams> tiles;
  std::uint64_t real_nnz = 0;

  std::uint64_t packed_count() const { return packed_idx.size(); }
};

// Deterministic source vector, stable across runs and platforms.
std::vector<double> default_x(index_t cols);

Workload make_workload(const CsrMatrix& m, const std::string& name,
                       std::uint64_t tile_nnz,
                       const std::vector<double>* x = nullptr);
Workload make_workload(const SellMatrix& m, const std::string& name,
                       std::uint64_t tile_nnz,
                       const std::vector<double>* x = nullptr);

class DramChannel;
void load_dram_image(DramChannel& dram, const Workload& wl);

// Compulsory traffic of one pass: every touched block moved exactly once.
std::uint64_t ideal_bytes_stream(const Workload& wl);
std::uint64_t ideal_bytes_system(const Workload& wl);

// Analytic VPC throughput model for one tile.
cycle_t compute_model(std::uint64_t packed_entries, unsigned strips,
                      const VpsConfig& vps);

// Ideal upstream requestor streaming the whole indirect dataflow through the
// adapter, matrix preloaded in the channel model. The gathered stream is
// checked against the oracle before the report is returned.
RunReport stream_run(const Workload& wl, const SimConfig& cfg, CoalMode mode,
                     std::vector<WideEvent>* events = nullptr);

// Tiled SpMV on the vector processor system with the adapter in the
// prefetch path, double-buffered tiles.
RunReport system_run(const Workload& wl, const SimConfig& cfg, CoalMode mode,
                     std::vector<WideEvent>* events = nullptr);

// Baseline system: naive SpMV through a 1 MiB LLC, coupled access/compute.
// Requires a csr workload. `passes` repeats the multiplication to expose
// cache-resident behavior.
RunReport baseline_run(const Workload& wl, const SimConfig& cfg,
                       unsigned passes = 1);

}  // namespace coalsim

#endif  // COALSIM_SYSTEM_HPP
