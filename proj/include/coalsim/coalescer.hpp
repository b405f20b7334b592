#ifndef COALSIM_COALESCER_HPP
#define COALSIM_COALESCER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "coalsim/dram.hpp"
#include "coalsim/fixed_queue.hpp"
#include "coalsim/types.hpp"

namespace coalsim {

enum class CoalMode : std::uint8_t { MLPNC, MLP, SEQ };

const char* coal_mode_name(CoalMode m);
std::optional<CoalMode> coal_mode_from_name(const std::string& s);

struct CoalescerConfig {
  CoalMode mode = CoalMode::MLP;
  unsigned window = 256;  // W, power of two, >= n_ports
  unsigned n_ports = 4;   // N
  unsigned upsizer_queue_depth = 2;
  unsigned downsizer_queue_depth = 2;
  unsigned hitmap_queue_depth = 128;
  unsigned offsets_queue_depth = 0;  // 0 -> 2048 / window
  cycle_t regulator_timeout = 64;
  cycle_t watchdog_timeout = 64;
  unsigned elem_width = 8;

  unsigned effective_offsets_depth() const {
    if (offsets_queue_depth) return offsets_queue_depth;
    unsigned d = 2048 / window;
    return d ? d : 1;
  }
  // SEQ serializes the parallel element requests down to one port.
  unsigned intake_width() const { return mode == CoalMode::SEQ ? 1 : n_ports; }
};

struct NarrowRequest {
  seq_t seq = 0;
  addr_t addr = 0;
};

struct OrderedElement {
  seq_t seq = 0;
  std::uint64_t bits = 0;  // elem_width low bytes
};

// Wide-request issue record: which window slots a response must feed.
struct MetaRecord {
  addr_t tag = 0;
  unsigned popcount = 0;
  std::vector<std::uint64_t> hitmap;
};

struct WideEvent {
  cycle_t cycle;
  addr_t tag;
  unsigned popcount;
  Category category;
};

// The request coalescer of the adapter: merges narrow element requests that
// fall in the same 64-byte block into single wide accesses and restores the
// original request order on the return path.
class RequestCoalescer {
 public:
  explicit RequestCoalescer(const CoalescerConfig& cfg);

  void begin_burst(std::uint64_t length);

  // Intake (upsizer). Requests must arrive in seq order per port
  // (port = seq mod N); the queue mapping is seq mod W.
  bool intake_ready(seq_t seq) const;
  void intake_push(const NarrowRequest& req);

  // Regulator + request watcher + watchdog, one cycle.
  void watcher_step(cycle_t cycle);

  // Return path: splits one wide response into per-slot elements. False if
  // an element queue is full this cycle (response retried later).
  bool try_consume_response(const WideResponse& resp);

  // Downsizer: pops up to intake-width elements in exact seq order, bounded
  // by the room the consumer reports. Appends to `out`.
  void downsizer_pop(std::size_t room, std::vector<OrderedElement>& out);

  // Downstream request port (single entry staging).
  bool wide_pending() const { return staged_.has_value(); }
  const WideRequest& wide_peek() const { return *staged_; }
  WideRequest wide_pop();

  bool drained() const;  // everything pushed has been delivered
  std::uint64_t delivered() const { return delivered_; }
  std::uint64_t wide_issued() const { return wide_issued_; }
  std::uint64_t meta_popcount_total() const { return meta_popcount_total_; }

  // Introspection for tests and the metrics cross-checks.
  std::size_t upsizer_occupancy(unsigned q) const { return req_queues_[q].size(); }
  std::size_t element_occupancy(unsigned q) const { return elem_queues_[q].size(); }
  std::size_t hitmap_occupancy() const { return hitmap_queue_.size(); }
  bool hitmap_near_full() const {
    return hitmap_queue_.size() * 4 >= hitmap_queue_.capacity() * 3;
  }
  unsigned window_valid_count() const;
  bool cshr_active() const { return cshr_.has_tag; }
  addr_t cshr_tag() const { return cshr_.tag; }
  unsigned cshr_popcount() const { return cshr_.popcount; }

  std::vector<WideEvent>* event_log = nullptr;   // optional, owned by caller
  std::vector<MetaRecord>* meta_log = nullptr;   // optional, test hook

  const CoalescerConfig& config() const { return cfg_; }

 private:
  struct Cshr {
    bool has_tag = false;
    addr_t tag = 0;
    unsigned popcount = 0;
    std::vector<std::uint64_t> hitmap;
    std::vector<std::uint8_t> offsets;
  };

  bool hitmap_bit(const std::vector<std::uint64_t>& map, unsigned w) const {
    return (map[w >> 6] >> (w & 63)) & 1;
  }
  void set_hitmap_bit(std::vector<std::uint64_t>& map, unsigned w) {
    map[w >> 6] |= std::uint64_t{1} << (w & 63);
  }

  void regulator_step(cycle_t cycle);
  void watchdog_step(cycle_t cycle);
  void mlpnc_step(cycle_t cycle);
  bool can_emit() const;
  void emit(cycle_t cycle);
  void clear_cshr();
  void adopt_tag_from_window();

  CoalescerConfig cfg_;
  unsigned hitmap_words_;

  // Upsizer request queues and the presented window.
  std::vector<FixedQueue<NarrowRequest>> req_queues_;
  unsigned nonempty_req_queues_ = 0;
  std::vector<NarrowRequest> window_;
  std::vector<std::uint8_t> window_valid_;
  std::vector<std::uint16_t> window_live_;  // valid slot indices, ascending
  bool have_window_ = false;

  Cshr cshr_;
  bool issue_pending_ = false;

  FixedQueue<MetaRecord> hitmap_queue_;
  std::vector<FixedQueue<std::uint8_t>> offsets_queues_;
  std::vector<FixedQueue<std::uint64_t>> elem_queues_;
  std::vector<std::uint64_t> resp_delivered_;  // slots of the head response served

  std::optional<WideRequest> staged_;

  // Regulator / watchdog timers.
  bool regulator_armed_ = false;
  cycle_t regulator_armed_at_ = 0;
  bool waiting_since_valid_ = false;
  cycle_t waiting_since_ = 0;

  // Burst bookkeeping.
  std::uint64_t burst_length_ = 0;
  std::uint64_t pushed_ = 0;
  std::uint64_t absorbed_ = 0;
  std::uint64_t delivered_ = 0;
  seq_t next_out_seq_ = 0;
  seq_t nc_next_seq_ = 0;

  std::uint64_t wide_issued_ = 0;
  std::uint64_t meta_popcount_total_ = 0;
};

}  // namespace coalsim

#endif  // COALSIM_COALESCER_HPP
