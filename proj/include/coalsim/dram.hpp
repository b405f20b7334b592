#ifndef COALSIM_DRAM_HPP
#define COALSIM_DRAM_HPP

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <vector>

#include "coalsim/types.hpp"

namespace coalsim {

// One HBM2-class channel at 1 GHz: 64-byte accesses, 2-cycle data bus
// occupancy (32 GB/s peak), open-page banks, FR-FCFS pick. Stands in for a
// full controller model; latencies are representative, not datasheet timing.
struct DramConfig {
  unsigned banks = 16;
  std::uint64_t row_bytes = 1024;
  cycle_t t_row_hit = 20;
  cycle_t t_row_miss = 44;
  unsigned scheduler_depth = 16;
  unsigned bus_cycles = 2;  // 64 B per 2 cycles = 32 GB/s
};

struct WideRequest {
  addr_t addr = 0;  // 64-byte aligned
  Category category = Category::ELEMENT;
  cycle_t issue_cycle = 0;
  bool is_write = false;
};

struct WideResponse {
  addr_t addr = 0;
  Category category = Category::ELEMENT;
  cycle_t complete_cycle = 0;
  std::array<std::uint8_t, kBlockBytes> data{};
};

class DramChannel {
 public:
  explicit DramChannel(const DramConfig& cfg = {});

  // Preload content. Regions must not overlap; reads outside any region
  // return zeros.
  void load_image(addr_t base, const std::uint8_t* bytes, std::uint64_t len);
  void load_image(addr_t base, const std::vector<std::uint8_t>& bytes) {
    load_image(base, bytes.data(), bytes.size());
  }

  // Transaction intake; false = scheduler queue full, retry later.
  // Unaligned addresses are a hard modeling error.
  bool submit(const WideRequest& req, cycle_t cycle);

  void step(cycle_t cycle);

  // In-order response stream per submitter category.
  bool response_ready(Category c, cycle_t cycle) const;
  WideResponse pop_response(Category c, cycle_t cycle);

  bool idle() const;  // nothing queued, in flight, or undelivered

  // Accounting.
  std::uint64_t bytes_moved(Category c) const {
    return bytes_[static_cast<int>(c)];
  }
  std::uint64_t total_bytes() const;
  std::uint64_t busy_cycles() const { return busy_cycles_; }
  std::uint64_t accesses() const { return picks_; }
  std::uint64_t queue_occupancy() const { return queue_.size(); }

  std::array<std::uint8_t, kBlockBytes> read_block(addr_t block_addr) const;

 private:
  struct Queued {
    WideRequest req;
    std::uint64_t order;
    unsigned bank;
    std::uint64_t row;
    std::uint64_t ticket;  // delivery slot for reads
  };
  struct Ticket {
    addr_t addr;
    std::uint64_t id;
    cycle_t complete_cycle;  // max() until picked
    bool done() const { return complete_cycle != ~cycle_t{0}; }
  };

  void locate(addr_t addr, unsigned& bank, std::uint64_t& row) const;

  DramConfig cfg_;
  std::vector<Queued> queue_;
  std::vector<std::int64_t> open_row_;  // -1 = no row open
  std::array<std::deque<Ticket>, kNumCategories> returns_;
  std::map<addr_t, std::vector<std::uint8_t>> image_;
  cycle_t bus_free_at_ = 0;
  cycle_t last_data_cycle_ = 0;
  std::uint64_t order_counter_ = 0;
  std::array<std::uint64_t, kNumCategories> ticket_counter_{};
  std::array<std::uint64_t, kNumCategories> bytes_{};
  std::uint64_t busy_cycles_ = 0;
  std::uint64_t picks_ = 0;
};

}  // namespace coalsim

#endif  // COALSIM_DRAM_HPP
