#include "coalsim/isu.hpp"

#include <algorithm>
#include <array>

namespace coalsim {

PackAdapter::PackAdapter(const IsuConfig& icfg, const CoalescerConfig& ccfg)
    : icfg_(icfg), coal_(ccfg) {
  COALSIM_CHECK(is_pow2(icfg_.n_ports) && icfg_.n_ports >= 1 &&
                icfg_.n_ports <= 64);
  COALSIM_CHECK(icfg_.bus_width == 64);
  COALSIM_CHECK(icfg_.index_queue_depth >= 1);
  // One wide index block must fit in the destination queues or the fetcher
  // can never issue.
  COALSIM_CHECK(static_cast<std::uint64_t>(icfg_.index_queue_depth) *
                    icfg_.n_ports >=
                kBlockBytes / icfg_.index_width);
  COALSIM_CHECK(icfg_.n_ports == ccfg.n_ports);
  index_queues_.assign(icfg_.n_ports, FixedQueue<index_t>(icfg_.index_queue_depth));
  index_inflight_.assign(icfg_.n_ports, 0);
  port_next_seq_.assign(icfg_.n_ports, 0);
  pack_buf_.reserve(2 * elems_per_beat_());
}

void PackAdapter::start_burst(const IndirectBurst& burst) {
  COALSIM_CHECK(!active_);
  COALSIM_CHECK(burst.index_width == icfg_.index_width);
  burst_ = burst;
  next_fetch_block_ = align_down(burst.index_base, kBlockBytes);
  fetch_end_ = burst.index_base + burst.length * burst.index_width;
  next_split_seq_ = 0;
  next_reserve_seq_ = 0;
  seq_serial_ = 0;
  for (unsigned p = 0; p < icfg_.n_ports; ++p) port_next_seq_[p] = p;
  gathered_.clear();
  coal_.begin_burst(burst.length);
  active_ = burst.length > 0;
}

void PackAdapter::packer_step() {
  unsigned epb = elems_per_beat_();
  bool burst_delivered = coal_.delivered() == burst_.length;
  unsigned valid = 0;
  if (pack_buf_.size() >= epb) {
    valid = epb;
  } else if (burst_delivered && !pack_buf_.empty()) {
    valid = static_cast<unsigned>(pack_buf_.size());  // final partial beat
  } else {
    return;
  }
  if (beat_log)
    beat_log->push_back(
        {{pack_buf_.begin(), pack_buf_.begin() + valid}, valid});
  pack_buf_.erase(pack_buf_.begin(), pack_buf_.begin() + valid);
  ++stats_.beats;
  stats_.elements_packed += valid;
  stats_.last_beat_valid = valid;
}

void PackAdapter::downsizer_step() {
  popped_.clear();
  std::size_t room = 2 * elems_per_beat_() - pack_buf_.size();
  coal_.downsizer_pop(room, popped_);
  for (const OrderedElement& e : popped_) {
    pack_buf_.push_back(e.bits);
    gathered_.push_back(e.bits);
  }
}

void PackAdapter::response_steps(cycle_t cycle, DramChannel& dram) {
  if (!pending_elem_resp_ && dram.response_ready(Category::ELEMENT, cycle))
    pending_elem_resp_ = dram.pop_response(Category::ELEMENT, cycle);
  if (pending_elem_resp_ && coal_.try_consume_response(*pending_elem_resp_))
    pending_elem_resp_.reset();

  if (dram.response_ready(Category::INDEX, cycle))
    split_index_block(dram.pop_response(Category::INDEX, cycle));
}

void PackAdapter::split_index_block(const WideResponse& resp) {
  addr_t lo = std::max(resp.addr, burst_.index_base);
  addr_t hi = std::min<addr_t>(resp.addr + kBlockBytes, fetch_end_);
  for (addr_t a = lo; a < hi; a += burst_.index_width) {
    index_t idx = 0;
    for (unsigned b = 0; b < burst_.index_width; ++b)
      idx |= static_cast<index_t>(resp.data[a - resp.addr + b]) << (8 * b);
    unsigned p = isu_port_of(next_split_seq_, icfg_.n_ports);
    index_queues_[p].push(idx);  // room reserved when the fetch was issued
    COALSIM_CHECK(index_inflight_[p] > 0);
    --index_inflight_[p];
    ++next_split_seq_;
  }
}

void PackAdapter::element_gen_step() {
  unsigned ew = coal_.config().elem_width;
  if (coal_.config().mode == CoalMode::SEQ) {
    unsigned p = static_cast<unsigned>(seq_serial_ % icfg_.n_ports);
    if (seq_serial_ < burst_.length && !index_queues_[p].empty() &&
        coal_.intake_ready(seq_serial_)) {
      index_t idx = index_queues_[p].pop();
      coal_.intake_push({seq_serial_, burst_.elem_base + static_cast<addr_t>(idx) * ew});
      ++seq_serial_;
      ++stats_.narrow_requests;
    }
    return;
  }
  for (unsigned p = 0; p < icfg_.n_ports; ++p) {
    seq_t seq = port_next_seq_[p];
    if (seq >= burst_.length || index_queues_[p].empty() || !coal_.intake_ready(seq))
      continue;
    index_t idx = index_queues_[p].pop();
    coal_.intake_push({seq, burst_.elem_base + static_cast<addr_t>(idx) * ew});
    port_next_seq_[p] += icfg_.n_ports;
    ++stats_.narrow_requests;
  }
}

void PackAdapter::fetcher_step(cycle_t cycle) {
  if (index_staged_ || next_fetch_block_ >= fetch_end_) return;

  // Indices this block contributes and their destination ports.
  addr_t lo = std::max(next_fetch_block_, burst_.index_base);
  addr_t hi = std::min<addr_t>(next_fetch_block_ + kBlockBytes, fetch_end_);
  std::uint64_t count = (hi - lo) / burst_.index_width;

  std::array<std::uint32_t, 64> add{};
  for (std::uint64_t j = 0; j < count; ++j)
    ++add[(next_reserve_seq_ + j) % icfg_.n_ports];
  for (unsigned p = 0; p < icfg_.n_ports; ++p)
    if (index_queues_[p].size() + index_inflight_[p] + add[p] >
        icfg_.index_queue_depth)
      return;  // backpressure, never overflow an index queue

  for (unsigned p = 0; p < icfg_.n_ports; ++p) index_inflight_[p] += add[p];
  index_staged_ = WideRequest{next_fetch_block_, Category::INDEX, cycle, false};
  next_reserve_seq_ += count;
  next_fetch_block_ += kBlockBytes;
  ++stats_.index_wide_reads;
  stats_.index_bytes += kBlockBytes;
}

bool PackAdapter::try_submit(cycle_t cycle, DramChannel& dram) {
  bool have_idx = index_staged_.has_value();
  bool have_elem = coal_.wide_pending();
  if (!have_idx && !have_elem) return false;

  // Round-robin; index fetches yield while element metadata queues run near
  // full, keeping the return path moving.
  bool idx_first = rr_index_first_ && !coal_.hitmap_near_full();
  bool pick_idx = have_idx && (idx_first || !have_elem);

  if (pick_idx) {
    if (!dram.submit(*index_staged_, cycle)) return false;
    if (event_log_)
      event_log_->push_back({cycle, index_staged_->addr, 0, Category::INDEX});
    index_staged_.reset();
    rr_index_first_ = false;
    return true;
  }
  if (!dram.submit(coal_.wide_peek(), cycle)) return false;
  coal_.wide_pop();
  rr_index_first_ = true;
  return true;
}

void PackAdapter::step(cycle_t cycle, DramChannel& dram, bool auto_submit) {
  if (!active_) return;
  packer_step();
  downsizer_step();
  response_steps(cycle, dram);
  coal_.watcher_step(cycle);
  element_gen_step();
  fetcher_step(cycle);
  if (auto_submit) try_submit(cycle, dram);

  if (coal_.drained() && pack_buf_.empty() && !pending_elem_resp_ &&
      !index_staged_)
    active_ = false;
}

}  // namespace coalsim
