#include "coalsim/sparse.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "coalsim/types.hpp"

namespace coalsim {

std::size_t SellMatrix::pad_count() const {
  std::size_t n = 0;
  for (std::uint8_t f : pad_flag) n += f;
  return n;
}

void coo_canonicalize(CooMatrix& m) {
  // Stable: duplicates keep arrival order so their values sum the same way
  // a direct accumulation would.
  std::stable_sort(m.entries.begin(), m.entries.end(),
                   [](const CooEntry& a, const CooEntry& b) {
                     return a.row != b.row ? a.row < b.row : a.col < b.col;
                   });
  std::size_t out = 0;
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    if (out > 0 && m.entries[out - 1].row == m.entries[i].row &&
        m.entries[out - 1].col == m.entries[i].col) {
      m.entries[out - 1].value += m.entries[i].value;
    } else {
      m.entries[out++] = m.entries[i];
    }
  }
  m.entries.resize(out);
}

CsrMatrix coo_to_csr(const CooMatrix& m) {
  CooMatrix sorted = m;
  coo_canonicalize(sorted);

  CsrMatrix csr;
  csr.rows = m.rows;
  csr.cols = m.cols;
  csr.row_ptr.assign(m.rows + 1, 0);
  csr.col_idx.reserve(sorted.entries.size());
  csr.values.reserve(sorted.entries.size());

  for (const CooEntry& e : sorted.entries) {
    COALSIM_CHECK(e.row < m.rows && e.col < m.cols);
    csr.row_ptr[e.row + 1]++;
    csr.col_idx.push_back(e.col);
    csr.values.push_back(e.value);
  }
  for (index_t r = 0; r < m.rows; ++r) csr.row_ptr[r + 1] += csr.row_ptr[r];
  return csr;
}

SellMatrix csr_to_sell(const CsrMatrix& m, index_t slice_height) {
  COALSIM_CHECK(slice_height >= 1);
  SellMatrix sell;
  sell.rows = m.rows;
  sell.cols = m.cols;
  sell.slice_height = slice_height;

  index_t n_slices = (m.rows + slice_height - 1) / slice_height;
  sell.slice_ptr.assign(n_slices + 1, 0);

  for (index_t s = 0; s < n_slices; ++s) {
    index_t width = 0;
    for (index_t r = s * slice_height; r < (s + 1) * slice_height && r < m.rows; ++r)
      width = std::max(width, m.row_len(r));
    sell.slice_ptr[s + 1] =
        sell.slice_ptr[s] + static_cast<std::uint64_t>(width) * slice_height;
  }

  sell.col_idx.assign(sell.slice_ptr[n_slices], 0);
  sell.values.assign(sell.slice_ptr[n_slices], 0.0);
  sell.pad_flag.assign(sell.slice_ptr[n_slices], 1);

  for (index_t s = 0; s < n_slices; ++s) {
    index_t width = sell.slice_width(s);
    for (index_t lane_row = 0; lane_row < slice_height; ++lane_row) {
      index_t r = s * slice_height + lane_row;
      index_t len = r < m.rows ? m.row_len(r) : 0;
      // Padded gathers reuse the row's last touched index so their addresses
      // stay inside already-fetched blocks and never fault.
      index_t pad_col = len > 0 ? m.col_idx[m.row_ptr[r] + len - 1] : 0;
      for (index_t k = 0; k < width; ++k) {
        std::uint64_t pos = sell.slice_ptr[s] +
                            static_cast<std::uint64_t>(k) * slice_height + lane_row;
        if (k < len) {
          sell.col_idx[pos] = m.col_idx[m.row_ptr[r] + k];
          sell.values[pos] = m.values[m.row_ptr[r] + k];
          sell.pad_flag[pos] = 0;
        } else {
          sell.col_idx[pos] = pad_col;
        }
      }
    }
  }
  return sell;
}

CooMatrix gen_stencil27(index_t nx, index_t ny, index_t nz) {
  COALSIM_CHECK(nx >= 1 && ny >= 1 && nz >= 1);
  std::uint64_t n = static_cast<std::uint64_t>(nx) * ny * nz;
  if (n > std::numeric_limits<std::int32_t>::max())
    throw std::overflow_error("stencil grid exceeds 32-bit index space");

  CooMatrix m;
  m.rows = m.cols = static_cast<index_t>(n);
  m.entries.reserve(n * 27);

  auto id = [&](index_t x, index_t y, index_t z) {
    return x + nx * (y + static_cast<std::uint64_t>(ny) * z);
  };

  for (index_t z = 0; z < nz; ++z)
    for (index_t y = 0; y < ny; ++y)
      for (index_t x = 0; x < nx; ++x) {
        index_t row = static_cast<index_t>(id(x, y, z));
        for (int dz = -1; dz <= 1; ++dz)
          for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
              std::int64_t cx = static_cast<std::int64_t>(x) + dx;
              std::int64_t cy = static_cast<std::int64_t>(y) + dy;
              std::int64_t cz = static_cast<std::int64_t>(z) + dz;
              if (cx < 0 || cx >= nx || cy < 0 || cy >= ny || cz < 0 || cz >= nz)
                continue;
              index_t col = static_cast<index_t>(
                  id(static_cast<index_t>(cx), static_cast<index_t>(cy),
                     static_cast<index_t>(cz)));
              m.entries.push_back({row, col, row == col ? 26.0 : -1.0});
            }
      }
  return m;
}

std::vector<index_t> csr_packed_rows(const CsrMatrix& m) {
  std::vector<index_t> rows(m.nnz());
  for (index_t r = 0; r < m.rows; ++r)
    for (index_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) rows[k] = r;
  return rows;
}

std::vector<index_t> sell_packed_rows(const SellMatrix& m) {
  std::vector<index_t> rows(m.packed_size());
  for (index_t s = 0; s < m.n_slices(); ++s) {
    index_t width = m.slice_width(s);
    for (index_t k = 0; k < width; ++k)
      for (index_t lane_row = 0; lane_row < m.slice_height; ++lane_row) {
        std::uint64_t pos = m.slice_ptr[s] +
                            static_cast<std::uint64_t>(k) * m.slice_height + lane_row;
        index_t r = s * m.slice_height + lane_row;
        rows[pos] = r < m.rows ? r : m.rows;  // ghost rows map past the end
      }
  }
  return rows;
}

}  // namespace coalsim
