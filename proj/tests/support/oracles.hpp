#ifndef COALSIM_TESTS_ORACLES_HPP
#define COALSIM_TESTS_ORACLES_HPP

// Independent reference implementations used only by tests. They must stay
// decoupled from the simulation paths they check.

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "coalsim/coalescer.hpp"
#include "coalsim/sparse.hpp"
#include "coalsim/types.hpp"

namespace coalsim::testing {

inline std::vector<double> dense_of(const CooMatrix& m) {
  std::vector<double> d(static_cast<std::size_t>(m.rows) * m.cols, 0.0);
  for (const CooEntry& e : m.entries)
    d[static_cast<std::size_t>(e.row) * m.cols + e.col] += e.value;
  return d;
}

inline std::vector<double> dense_of(const CsrMatrix& m) {
  std::vector<double> d(static_cast<std::size_t>(m.rows) * m.cols, 0.0);
  for (index_t r = 0; r < m.rows; ++r)
    for (index_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
      d[static_cast<std::size_t>(r) * m.cols + m.col_idx[k]] += m.values[k];
  return d;
}

inline std::vector<double> dense_of(const SellMatrix& m) {
  std::vector<double> d(static_cast<std::size_t>(m.rows) * m.cols, 0.0);
  for (index_t s = 0; s < m.n_slices(); ++s)
    for (index_t k = 0; k < m.slice_width(s); ++k)
      for (index_t lr = 0; lr < m.slice_height; ++lr) {
        std::uint64_t pos =
            m.slice_ptr[s] + static_cast<std::uint64_t>(k) * m.slice_height + lr;
        index_t r = s * m.slice_height + lr;
        if (r >= m.rows || m.pad_flag[pos]) continue;
        d[static_cast<std::size_t>(r) * m.cols + m.col_idx[pos]] += m.values[pos];
      }
  return d;
}

inline std::vector<double> spmv_reference(const CsrMatrix& m,
                                          const std::vector<double>& x) {
  std::vector<double> y(m.rows, 0.0);
  for (index_t r = 0; r < m.rows; ++r)
    for (index_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
      y[r] += m.values[k] * x[m.col_idx[k]];
  return y;
}

// Brute-force greedy grouping of one request window: repeatedly adopt the
// lowest-index valid slot's block and absorb every matching slot.
struct GreedyEmission {
  addr_t tag;
  std::vector<unsigned> slots;  // ascending window slots served
};

inline std::vector<GreedyEmission> greedy_window_oracle(
    const std::vector<std::pair<unsigned, addr_t>>& entries) {
  std::vector<std::pair<unsigned, addr_t>> live = entries;
  std::vector<GreedyEmission> out;
  while (!live.empty()) {
    addr_t tag = block_of(live.front().second);
    GreedyEmission e{tag, {}};
    std::vector<std::pair<unsigned, addr_t>> rest;
    for (const auto& [slot, addr] : live) {
      if (block_of(addr) == tag)
        e.slots.push_back(slot);
      else
        rest.push_back({slot, addr});
    }
    out.push_back(std::move(e));
    live.swap(rest);
  }
  return out;
}

// Small deterministic RNG for property tests.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed ^ 0x2545f4914f6cdd1dull) {}
  std::uint64_t next() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state;
  }
  std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

}  // namespace coalsim::testing

#endif  // COALSIM_TESTS_ORACLES_HPP
