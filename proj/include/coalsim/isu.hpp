#ifndef COALSIM_ISU_HPP
#define COALSIM_ISU_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "coalsim/coalescer.hpp"
#include "coalsim/dram.hpp"
#include "coalsim/fixed_queue.hpp"
#include "coalsim/types.hpp"
#include "coalsim/workload.hpp"

namespace coalsim {

struct IsuConfig {
  unsigned n_ports = 4;  // power of two
  unsigned bus_width = 64;
  unsigned index_queue_depth = 256;  // per port
  unsigned index_width = 4;
};

struct PackedBeat {
  std::vector<std::uint64_t> elems;  // densely packed, seq order
  unsigned valid_count = 0;
};

// Index with sequence s is split to port s mod N; within a port, pushes keep
// increasing s.
inline unsigned isu_port_of(seq_t seq, unsigned n_ports) {
  return static_cast<unsigned>(seq % n_ports);
}

struct IsuStats {
  std::uint64_t index_wide_reads = 0;
  std::uint64_t index_bytes = 0;
  std::uint64_t narrow_requests = 0;
  std::uint64_t beats = 0;
  std::uint64_t elements_packed = 0;
  unsigned last_beat_valid = 0;
};

// The extended adapter: index fetcher, index splitter, element request
// generator, request coalescer, element packer, plus the shared downstream
// request port. Processes one indirect burst at a time.
class PackAdapter {
 public:
  PackAdapter(const IsuConfig& icfg, const CoalescerConfig& ccfg);

  bool busy() const { return active_; }
  void start_burst(const IndirectBurst& burst);

  // One cycle. Consumes INDEX/ELEMENT responses from the channel; with
  // auto_submit it also owns the request port. When the port is shared, the
  // caller invokes try_submit on the adapter's turn instead.
  void step(cycle_t cycle, DramChannel& dram, bool auto_submit = true);
  bool try_submit(cycle_t cycle, DramChannel& dram);

  // Gathered element values of the current burst, in original order,
  // appended beat by beat.
  const std::vector<std::uint64_t>& gathered() const { return gathered_; }
  std::vector<std::uint64_t> take_gathered() { return std::move(gathered_); }

  const IsuStats& stats() const { return stats_; }
  const RequestCoalescer& coalescer() const { return coal_; }
  RequestCoalescer& coalescer() { return coal_; }

  std::size_t index_queue_occupancy(unsigned p) const {
    return index_queues_[p].size();
  }

  // Event records for the adapter's wide requests (INDEX + ELEMENT).
  void set_event_log(std::vector<WideEvent>* log) {
    event_log_ = log;
    coal_.event_log = log;
  }

  std::vector<PackedBeat>* beat_log = nullptr;  // optional, test hook

 private:
  void packer_step();
  void downsizer_step();
  void response_steps(cycle_t cycle, DramChannel& dram);
  void element_gen_step();
  void fetcher_step(cycle_t cycle);
  void split_index_block(const WideResponse& resp);

  IsuConfig icfg_;
  RequestCoalescer coal_;

  // Burst state.
  bool active_ = false;
  IndirectBurst burst_{};
  addr_t next_fetch_block_ = 0;
  addr_t fetch_end_ = 0;       // one past the last index byte
  seq_t next_split_seq_ = 0;   // seq of the next index to come back
  seq_t next_reserve_seq_ = 0; // seq of the first index in the next fetch
  std::vector<seq_t> port_next_seq_;
  seq_t seq_serial_ = 0;       // SEQ mode: next seq to admit

  std::vector<FixedQueue<index_t>> index_queues_;
  std::vector<std::uint32_t> index_inflight_;  // reserved by issued fetches

  std::optional<WideRequest> index_staged_;
  std::optional<WideResponse> pending_elem_resp_;

  // Element packer.
  std::vector<std::uint64_t> pack_buf_;
  std::vector<OrderedElement> popped_;
  std::vector<std::uint64_t> gathered_;

  bool rr_index_first_ = false;  // round-robin pointer of the request port
  std::vector<WideEvent>* event_log_ = nullptr;
  IsuStats stats_;

  unsigned elems_per_beat_() const {
    return icfg_.bus_width / coal_.config().elem_width;
  }
};

}  // namespace coalsim

#endif  // COALSIM_ISU_HPP
