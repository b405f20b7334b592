#include "coalsim/workload.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace coalsim {

namespace {

AddressMap layout(std::uint64_t ptr_entries, std::uint64_t packed,
                  std::uint64_t cols, std::uint64_t rows, addr_t base) {
  AddressMap map;
  map.ptr_base = align_up(base, kBlockBytes);
  map.ptr_bytes = ptr_entries * kIndexBytes;
  map.idx_base = align_up(map.ptr_base + map.ptr_bytes, kBlockBytes);
  map.idx_bytes = packed * kIndexBytes;
  map.val_base = align_up(map.idx_base + map.idx_bytes, kBlockBytes);
  map.val_bytes = packed * kValueBytes;
  map.x_base = align_up(map.val_base + map.val_bytes, kBlockBytes);
  map.x_bytes = cols * kValueBytes;
  map.y_base = align_up(map.x_base + map.x_bytes, kBlockBytes);
  map.y_bytes = rows * kValueBytes;
  return map;
}

// Shared tiling walk: `strips` are indivisible units (rows for CSR, slices
// for SELL) described by their packed-entry spans.
struct Strip {
  std::uint64_t entry_begin;
  std::uint64_t entry_end;
  index_t row_begin;
  index_t row_end;
};

std::vector<TileStreams> tile_strips(const std::vector<Strip>& strips,
                                     const AddressMap& map,
                                     std::uint64_t tile_nnz) {
  if (tile_nnz < 1) throw std::invalid_argument("tile_nnz must be >= 1");
  for (const Strip& s : strips)
    if (s.entry_end - s.entry_begin > tile_nnz)
      throw std::invalid_argument(
          "tile_nnz smaller than one indivisible slice/row span");

  std::vector<TileStreams> tiles;
  std::uint64_t ptr_consumed = 0;  // pointer entries already fetched
  std::size_t i = 0;
  while (i < strips.size()) {
    std::size_t j = i;
    std::uint64_t entries = 0;
    while (j < strips.size() &&
           entries + (strips[j].entry_end - strips[j].entry_begin) <= tile_nnz) {
      entries += strips[j].entry_end - strips[j].entry_begin;
      ++j;
    }

    TileStreams t;
    t.first_entry = strips[i].entry_begin;
    t.entry_count = entries;
    t.first_row = strips[i].row_begin;
    t.row_count = strips[j - 1].row_end - strips[i].row_begin;
    t.strip_count = static_cast<index_t>(j - i);

    // Pointer entries partition exactly: the first tile takes one extra for
    // the leading offset, later tiles reuse the previous tile's last entry.
    std::uint64_t ptr_needed = (j - i) + (tiles.empty() ? 1 : 0);
    t.ptr_burst.base = map.ptr_base + ptr_consumed * kIndexBytes;
    t.ptr_burst.length_bytes = ptr_needed * kIndexBytes;
    ptr_consumed += ptr_needed;

    t.val_burst.base = map.val_base + t.first_entry * kValueBytes;
    t.val_burst.length_bytes = entries * kValueBytes;

    t.gather.index_base = map.idx_base + t.first_entry * kIndexBytes;
    t.gather.elem_base = map.x_base;
    t.gather.length = entries;

    tiles.push_back(t);
    i = j;
  }
  return tiles;
}

}  // namespace

AddressMap layout_csr(const CsrMatrix& m, addr_t base) {
  return layout(m.row_ptr.size(), m.nnz(), m.cols, m.rows, base);
}

AddressMap layout_sell(const SellMatrix& m, addr_t base) {
  return layout(m.slice_ptr.size(), m.packed_size(), m.cols, m.rows, base);
}

std::vector<TileStreams> spmv_streams(const CsrMatrix& m, const AddressMap& map,
                                      std::uint64_t tile_nnz) {
  std::vector<Strip> strips;
  strips.reserve(m.rows);
  for (index_t r = 0; r < m.rows; ++r)
    strips.push_back({m.row_ptr[r], m.row_ptr[r + 1], r, r + 1});
  return tile_strips(strips, map, tile_nnz);
}

std::vector<TileStreams> spmv_streams(const SellMatrix& m, const AddressMap& map,
                                      std::uint64_t tile_nnz) {
  std::vector<Strip> strips;
  strips.reserve(m.n_slices());
  for (index_t s = 0; s < m.n_slices(); ++s) {
    index_t row_end = std::min<index_t>((s + 1) * m.slice_height, m.rows);
    strips.push_back(
        {m.slice_ptr[s], m.slice_ptr[s + 1], s * m.slice_height, row_end});
  }
  return tile_strips(strips, map, tile_nnz);
}

std::vector<double> gather_oracle(const std::vector<double>& x,
                                  const std::vector<index_t>& idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (index_t i : idx) {
    if (i >= x.size()) throw std::out_of_range("gather index out of range");
    out.push_back(x[i]);
  }
  return out;
}

std::uint64_t distinct_gather_blocks(const std::vector<index_t>& idx,
                                     addr_t elem_base, unsigned elem_width) {
  std::unordered_set<addr_t> blocks;
  for (index_t i : idx)
    blocks.insert(block_of(elem_base + static_cast<addr_t>(i) * elem_width));
  return blocks.size();
}

}  // namespace coalsim
