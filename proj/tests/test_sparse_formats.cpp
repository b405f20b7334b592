#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "coalsim/binary_cache.hpp"
#include "coalsim/matrix_market.hpp"
#include "coalsim/sparse.hpp"
#include "support/oracles.hpp"

using namespace coalsim;
using namespace coalsim::testing;

TEST_CASE("matrix market: general real coordinate") {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real general\n"
      "% a comment\n"
      "2 2 2\n"
      "1 1 3.0\n"
      "2 2 4.0\n");
  CooMatrix m = parse_matrix_market(in);
  CHECK(m.rows == 2);
  CHECK(m.cols == 2);
  REQUIRE(m.entries.size() == 2);
  CHECK(m.entries[0].row == 0);
  CHECK(m.entries[0].col == 0);
  CHECK(m.entries[0].value == 3.0);
  CHECK(m.entries[1].row == 1);
  CHECK(m.entries[1].col == 1);
  CHECK(m.entries[1].value == 4.0);
}

TEST_CASE("matrix market: symmetric expansion") {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real symmetric\n"
      "2 2 1\n"
      "2 1 5.0\n");
  CooMatrix m = parse_matrix_market(in);
  REQUIRE(m.entries.size() == 2);
  CHECK(m.entries[0].row == 0);
  CHECK(m.entries[0].col == 1);
  CHECK(m.entries[0].value == 5.0);
  CHECK(m.entries[1].row == 1);
  CHECK(m.entries[1].col == 0);
}

TEST_CASE("matrix market: out-of-bounds entry names the line") {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real general\n"
      "2 2 1\n"
      "3 1 1.0\n");
  try {
    parse_matrix_market(in);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("matrix market: pattern gets value 1, duplicates summed") {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate pattern general\n"
      "2 2 2\n"
      "1 2\n"
      "1 2\n");
  CooMatrix m = parse_matrix_market(in);
  REQUIRE(m.entries.size() == 1);
  CHECK(m.entries[0].value == 2.0);
}

TEST_CASE("matrix market: rejects array format and bad banner") {
  std::istringstream arr("%%MatrixMarket matrix array real general\n2 2 4\n");
  CHECK_THROWS_AS(parse_matrix_market(arr), ParseError);
  std::istringstream bad("%MatrixMarket matrix coordinate real general\n");
  CHECK_THROWS_AS(parse_matrix_market(bad), ParseError);
}

TEST_CASE("matrix market: write/parse round trip") {
  CooMatrix m = gen_stencil27(3, 2, 1);
  std::ostringstream out;
  write_matrix_market(out, m);
  std::istringstream in(out.str());
  CooMatrix back = parse_matrix_market(in);
  CHECK(dense_of(back) == dense_of(m));
}

TEST_CASE("coo_to_csr: identity") {
  CooMatrix m{3, 3, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}}};
  CsrMatrix c = coo_to_csr(m);
  CHECK(c.row_ptr == std::vector<index_t>{0, 1, 2, 3});
  CHECK(c.col_idx == std::vector<index_t>{0, 1, 2});
  CHECK(c.values == std::vector<double>{1.0, 1.0, 1.0});
}

TEST_CASE("coo_to_csr: empty matrix") {
  CooMatrix m{2, 2, {}};
  CsrMatrix c = coo_to_csr(m);
  CHECK(c.row_ptr == std::vector<index_t>{0, 0, 0});
  CHECK(c.col_idx.empty());
}

TEST_CASE("coo_to_csr: sorts within rows") {
  // hand-sorted: (0,0,b),(0,1,a),(1,0,c)
  CooMatrix m{2, 2, {{0, 1, 2.5}, {0, 0, 1.5}, {1, 0, 3.5}}};
  CsrMatrix c = coo_to_csr(m);
  CHECK(c.row_ptr == std::vector<index_t>{0, 2, 3});
  CHECK(c.col_idx == std::vector<index_t>{0, 1, 0});
  CHECK(c.values == std::vector<double>{1.5, 2.5, 3.5});
}

TEST_CASE("csr_to_sell: identity with slice height 2") {
  CooMatrix coo{3, 3, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}}};
  SellMatrix s = csr_to_sell(coo_to_csr(coo), 2);
  REQUIRE(s.n_slices() == 2);
  CHECK(s.slice_width(0) == 1);
  CHECK(s.slice_width(1) == 1);
  CHECK(s.packed_size() == 4);
  CHECK(s.pad_count() == 1);  // the ghost lane of the final slice
  // lane-major slice 0: rows 0,1 -> cols 0,1
  CHECK(s.col_idx[0] == 0);
  CHECK(s.col_idx[1] == 1);
  CHECK(s.col_idx[2] == 2);
  CHECK(s.pad_flag[3] == 1);
}

TEST_CASE("csr_to_sell: ragged rows pad to the slice width") {
  CooMatrix coo{2, 4, {{0, 0, 1.}, {0, 1, 2.}, {0, 2, 3.}, {1, 3, 4.}}};
  SellMatrix s = csr_to_sell(coo_to_csr(coo), 2);
  REQUIRE(s.n_slices() == 1);
  CHECK(s.slice_width(0) == 3);
  CHECK(s.packed_size() == 6);
  CHECK(s.pad_count() == 2);
  // padded entries reuse the row's last real column
  CHECK(s.col_idx[3] == 3);
  CHECK(s.col_idx[5] == 3);
  CHECK(s.values[3] == 0.0);
}

TEST_CASE("csr_to_sell: slice height 1 degenerates with zero padding") {
  CooMatrix coo = gen_stencil27(2, 2, 1);
  SellMatrix s = csr_to_sell(coo_to_csr(coo), 1);
  CHECK(s.n_slices() == 4);
  CHECK(s.pad_count() == 0);
}

TEST_CASE("gen_stencil27: trivial and small grids") {
  CooMatrix one = gen_stencil27(1, 1, 1);
  REQUIRE(one.entries.size() == 1);
  CHECK(one.entries[0].value == 26.0);

  CooMatrix two = gen_stencil27(2, 1, 1);
  CHECK(two.rows == 2);
  REQUIRE(two.entries.size() == 4);
  double diag = 0.0, off = 0.0;
  for (auto& e : two.entries) (e.row == e.col ? diag : off) += e.value;
  CHECK(diag == 52.0);
  CHECK(off == -2.0);
}

namespace {

// Neighbor-count oracle: grid point degree by bounds enumeration.
int stencil_degree(int x, int y, int z, int n) {
  int c = 0;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        int cx = x + dx, cy = y + dy, cz = z + dz;
        if (cx >= 0 && cx < n && cy >= 0 && cy < n && cz >= 0 && cz < n) ++c;
      }
  return c;
}

}  // namespace

TEST_CASE("gen_stencil27: 3x3x3 row populations") {
  CooMatrix m = gen_stencil27(3, 3, 3);
  CHECK(m.rows == 27);
  std::vector<int> rowlen(27, 0);
  for (auto& e : m.entries) rowlen[e.row]++;
  CHECK(rowlen[13] == 27);                    // center
  CHECK(rowlen[0] == stencil_degree(0, 0, 0, 3));
  CHECK(rowlen[0] == 8);
  CHECK(rowlen[26] == 8);
  for (int z = 0; z < 3; ++z)
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 3; ++x)
        CHECK(rowlen[x + 3 * (y + 3 * z)] == stencil_degree(x, y, z, 3));
}

TEST_CASE("gen_stencil27: overflow of the index type") {
  CHECK_THROWS_AS(gen_stencil27(2048, 2048, 2048), std::overflow_error);
}

TEST_CASE("gen_stencil27: generated matrix is symmetric") {
  CooMatrix m = gen_stencil27(3, 4, 2);
  auto key = [&](index_t r, index_t c) {
    return static_cast<std::uint64_t>(r) * m.cols + c;
  };
  std::map<std::uint64_t, double> fwd, rev;
  for (auto& e : m.entries) {
    fwd[key(e.row, e.col)] = e.value;
    rev[key(e.col, e.row)] = e.value;
  }
  CHECK(fwd == rev);
}

TEST_CASE("property: coo -> csr round trip preserves the dense matrix") {
  Rng rng(7);
  for (int it = 0; it < 50; ++it) {
    CooMatrix m;
    m.rows = 1 + static_cast<index_t>(rng.below(12));
    m.cols = 1 + static_cast<index_t>(rng.below(12));
    std::uint64_t n = rng.below(40);
    for (std::uint64_t i = 0; i < n; ++i)
      m.entries.push_back({static_cast<index_t>(rng.below(m.rows)),
                           static_cast<index_t>(rng.below(m.cols)),
                           rng.unit() - 0.5});
    CHECK(dense_of(coo_to_csr(m)) == dense_of(m));
  }
}

TEST_CASE("property: SELL is lossless and its padding bound is exact") {
  Rng rng(13);
  for (index_t h : {1u, 2u, 32u}) {
    for (int it = 0; it < 20; ++it) {
      CooMatrix m;
      m.rows = 1 + static_cast<index_t>(rng.below(70));
      m.cols = 1 + static_cast<index_t>(rng.below(40));
      std::uint64_t n = rng.below(3 * m.rows);
      for (std::uint64_t i = 0; i < n; ++i)
        m.entries.push_back({static_cast<index_t>(rng.below(m.rows)),
                             static_cast<index_t>(rng.below(m.cols)),
                             1.0 + rng.unit()});
      CsrMatrix csr = coo_to_csr(m);
      SellMatrix sell = csr_to_sell(csr, h);
      CHECK(dense_of(sell) == dense_of(csr));

      std::uint64_t bound = 0;
      for (index_t s = 0; s < sell.n_slices(); ++s)
        bound += static_cast<std::uint64_t>(sell.slice_width(s)) * h;
      CHECK(sell.pad_count() == bound - csr.nnz());
    }
  }
}

TEST_CASE("binary cache round trips csr and sell") {
  namespace fs = std::filesystem;
  CsrMatrix csr = coo_to_csr(gen_stencil27(4, 3, 2));
  SellMatrix sell = csr_to_sell(csr, 32);
  fs::path dir = fs::temp_directory_path() / "coalsim_cache_test";
  fs::create_directories(dir);

  save_csr_cache((dir / "m.csr.bin").string(), csr);
  CsrMatrix csr2 = load_csr_cache((dir / "m.csr.bin").string());
  CHECK(csr2.row_ptr == csr.row_ptr);
  CHECK(csr2.col_idx == csr.col_idx);
  CHECK(csr2.values == csr.values);

  save_sell_cache((dir / "m.sell.bin").string(), sell);
  SellMatrix sell2 = load_sell_cache((dir / "m.sell.bin").string());
  CHECK(sell2.slice_ptr == sell.slice_ptr);
  CHECK(sell2.col_idx == sell.col_idx);
  CHECK(sell2.values == sell.values);
  CHECK(sell2.pad_flag == sell.pad_flag);

  CHECK_THROWS(load_sell_cache((dir / "m.csr.bin").string()));
  fs::remove_all(dir);
}
