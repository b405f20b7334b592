#ifndef COALSIM_SPARSE_HPP
#define COALSIM_SPARSE_HPP

#include <cstdint>
#include <vector>

namespace coalsim {

// Storage widths follow the evaluated hardware: 32-bit indices, 64-bit values.
using index_t = std::uint32_t;

struct CooEntry {
  index_t row;
  index_t col;
  double value;
};

// Interchange form produced by ingestion. Canonical: sorted by (row, col),
// duplicates summed.
struct CooMatrix {
  index_t rows = 0;
  index_t cols = 0;
  std::vector<CooEntry> entries;
};

struct CsrMatrix {
  index_t rows = 0;
  index_t cols = 0;
  std::vector<index_t> row_ptr;  // rows + 1 offsets
  std::vector<index_t> col_idx;
  std::vector<double> values;

  std::size_t nnz() const { return col_idx.size(); }
  index_t row_len(index_t r) const { return row_ptr[r + 1] - row_ptr[r]; }
};

// Sliced ELLPACK, lane-major inside each slice, no row reordering.
// Slice s spans packed range [slice_ptr[s], slice_ptr[s+1]); the entry for
// lane k of row r (r relative to the slice) lives at slice_ptr[s] +
// k * slice_height + r. Rows past the matrix end in the last slice are all
// padding.
struct SellMatrix {
  index_t rows = 0;
  index_t cols = 0;
  index_t slice_height = 32;
  std::vector<std::uint64_t> slice_ptr;  // n_slices + 1 offsets
  std::vector<index_t> col_idx;          // packed, padded
  std::vector<double> values;            // packed, padded
  std::vector<std::uint8_t> pad_flag;    // 1 for padded entries

  index_t n_slices() const {
    return static_cast<index_t>(slice_ptr.empty() ? 0 : slice_ptr.size() - 1);
  }
  index_t slice_width(index_t s) const {
    return static_cast<index_t>((slice_ptr[s + 1] - slice_ptr[s]) / slice_height);
  }
  std::size_t packed_size() const { return col_idx.size(); }
  std::size_t pad_count() const;
};

// Canonicalize in place: sort by (row, col), sum duplicates.
void coo_canonicalize(CooMatrix& m);

CsrMatrix coo_to_csr(const CooMatrix& m);
SellMatrix csr_to_sell(const CsrMatrix& m, index_t slice_height);

// 27-point stencil on an nx*ny*nz grid, diagonal 26.0, off-diagonals -1.0.
// Throws std::overflow_error when the grid exceeds the 32-bit index space.
CooMatrix gen_stencil27(index_t nx, index_t ny, index_t nz);

// Row id of each packed entry, used when accumulating SpMV results from the
// packed streams.
std::vector<index_t> csr_packed_rows(const CsrMatrix& m);
std::vector<index_t> sell_packed_rows(const SellMatrix& m);

}  // namespace coalsim

#endif  // COALSIM_SPARSE_HPP
