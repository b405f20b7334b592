#ifndef COALSIM_WORKLOAD_HPP
#define COALSIM_WORKLOAD_HPP

#include <cstdint>
#include <vector>

#include "coalsim/sparse.hpp"
#include "coalsim/types.hpp"

namespace coalsim {

constexpr unsigned kIndexBytes = 4;
constexpr unsigned kValueBytes = 8;

// Byte placement of the six SpMV arrays in DRAM. Regions are disjoint and
// block-aligned.
struct AddressMap {
  addr_t ptr_base = 0;    // slice pointers (SELL) or row pointers (CSR), 4B each
  addr_t idx_base = 0;    // packed column indices, 4B each
  addr_t val_base = 0;    // packed nonzeros, 8B each
  addr_t x_base = 0;      // source vector, 8B each
  addr_t y_base = 0;      // result vector, 8B each
  std::uint64_t ptr_bytes = 0;
  std::uint64_t idx_bytes = 0;
  std::uint64_t val_bytes = 0;
  std::uint64_t x_bytes = 0;
  std::uint64_t y_bytes = 0;
};

AddressMap layout_csr(const CsrMatrix& m, addr_t base = 0x1000);
AddressMap layout_sell(const SellMatrix& m, addr_t base = 0x1000);

struct ContiguousBurst {
  addr_t base = 0;
  std::uint64_t length_bytes = 0;
};

// Decoupled descriptor: gather `length` elements of width elem_width using
// the index array at index_base.
struct IndirectBurst {
  addr_t index_base = 0;
  addr_t elem_base = 0;
  std::uint64_t length = 0;
  unsigned index_width = kIndexBytes;
  unsigned elem_width = kValueBytes;
};

// One tile of the SpMV dataflow as the prefetcher sees it.
struct TileStreams {
  ContiguousBurst ptr_burst;
  ContiguousBurst val_burst;
  IndirectBurst gather;
  std::uint64_t first_entry = 0;  // packed-entry range [first, first + count)
  std::uint64_t entry_count = 0;
  index_t first_row = 0;
  index_t row_count = 0;
  index_t strip_count = 0;  // slices (SELL) or rows (CSR) in the tile
};

// Split the dataflow into tiles of at most tile_nnz packed entries, on slice
// boundaries for SELL and row boundaries for CSR. Throws
// std::invalid_argument when a single slice/row exceeds tile_nnz.
std::vector<TileStreams> spmv_streams(const CsrMatrix& m, const AddressMap& map,
                                      std::uint64_t tile_nnz);
std::vector<TileStreams> spmv_streams(const SellMatrix& m, const AddressMap& map,
                                      std::uint64_t tile_nnz);

// Functional ground truth for the gather path.
std::vector<double> gather_oracle(const std::vector<double>& x,
                                  const std::vector<index_t>& idx);

// Number of distinct 64-byte blocks touched when gathering x through idx —
// the compulsory element traffic of one pass.
std::uint64_t distinct_gather_blocks(const std::vector<index_t>& idx,
                                     addr_t elem_base, unsigned elem_width);

}  // namespace coalsim

#endif  // COALSIM_WORKLOAD_HPP
