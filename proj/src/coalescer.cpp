#include "coalsim/coalescer.hpp"

#include <algorithm>
#include <string>

namespace coalsim {

const char* coal_mode_name(CoalMode m) {
  switch (m) {
    case CoalMode::MLPNC: return "mlpnc";
    case CoalMode::MLP: return "mlp";
    case CoalMode::SEQ: return "seq";
  }
  return "?";
}

std::optional<CoalMode> coal_mode_from_name(const std::string& s) {
  if (s == "mlpnc") return CoalMode::MLPNC;
  if (s == "mlp") return CoalMode::MLP;
  if (s == "seq") return CoalMode::SEQ;
  return std::nullopt;
}

RequestCoalescer::RequestCoalescer(const CoalescerConfig& cfg) : cfg_(cfg) {
  COALSIM_CHECK(is_pow2(cfg_.window) && is_pow2(cfg_.n_ports));
  COALSIM_CHECK(cfg_.window >= cfg_.n_ports);
  COALSIM_CHECK(cfg_.elem_width == 4 || cfg_.elem_width == 8);
  hitmap_words_ = (cfg_.window + 63) / 64;

  req_queues_.assign(cfg_.window, FixedQueue<NarrowRequest>(cfg_.upsizer_queue_depth));
  offsets_queues_.assign(cfg_.window,
                         FixedQueue<std::uint8_t>(cfg_.effective_offsets_depth()));
  elem_queues_.assign(cfg_.window,
                      FixedQueue<std::uint64_t>(cfg_.downsizer_queue_depth));
  hitmap_queue_.reset(cfg_.hitmap_queue_depth);

  window_.assign(cfg_.window, NarrowRequest{});
  window_valid_.assign(cfg_.window, 0);
  cshr_.hitmap.assign(hitmap_words_, 0);
  cshr_.offsets.assign(cfg_.window, 0);
}

void RequestCoalescer::begin_burst(std::uint64_t length) {
  COALSIM_CHECK(drained());
  COALSIM_CHECK(nonempty_req_queues_ == 0 && !have_window_ && !cshr_.has_tag);
  burst_length_ = length;
  pushed_ = absorbed_ = delivered_ = 0;
  next_out_seq_ = nc_next_seq_ = 0;
  regulator_armed_ = false;
  waiting_since_valid_ = false;
}

bool RequestCoalescer::intake_ready(seq_t seq) const {
  return !req_queues_[seq % cfg_.window].full();
}

void RequestCoalescer::intake_push(const NarrowRequest& req) {
  unsigned q = static_cast<unsigned>(req.seq % cfg_.window);
  auto& fq = req_queues_[q];
  COALSIM_CHECK(!fq.full());
  if (fq.empty()) ++nonempty_req_queues_;
  fq.push(req);
  ++pushed_;
  COALSIM_CHECK(pushed_ <= burst_length_);
}

unsigned RequestCoalescer::window_valid_count() const {
  return static_cast<unsigned>(window_live_.size());
}

bool RequestCoalescer::can_emit() const {
  if (staged_.has_value() || hitmap_queue_.full()) return false;
  for (unsigned w = 0; w < cfg_.window; ++w)
    if (hitmap_bit(cshr_.hitmap, w) && offsets_queues_[w].full()) return false;
  return true;
}

void RequestCoalescer::emit(cycle_t cycle) {
  COALSIM_CHECK(cshr_.has_tag && cshr_.popcount > 0);
  MetaRecord rec;
  rec.tag = cshr_.tag;
  rec.popcount = cshr_.popcount;
  rec.hitmap = cshr_.hitmap;
  hitmap_queue_.push(rec);
  for (unsigned w = 0; w < cfg_.window; ++w)
    if (hitmap_bit(cshr_.hitmap, w)) offsets_queues_[w].push(cshr_.offsets[w]);

  staged_ = WideRequest{cshr_.tag, Category::ELEMENT, cycle, false};
  ++wide_issued_;
  meta_popcount_total_ += cshr_.popcount;
  if (event_log)
    event_log->push_back({cycle, cshr_.tag, cshr_.popcount, Category::ELEMENT});
  if (meta_log) meta_log->push_back(rec);
  clear_cshr();
}

void RequestCoalescer::clear_cshr() {
  cshr_.has_tag = false;
  cshr_.popcount = 0;
  std::fill(cshr_.hitmap.begin(), cshr_.hitmap.end(), 0);
  issue_pending_ = false;
}

void RequestCoalescer::adopt_tag_from_window() {
  COALSIM_CHECK(!window_live_.empty());
  cshr_.tag = block_of(window_[window_live_.front()].addr);
  cshr_.has_tag = true;
}

WideRequest RequestCoalescer::wide_pop() {
  COALSIM_CHECK(staged_.has_value());
  WideRequest r = *staged_;
  staged_.reset();
  return r;
}

void RequestCoalescer::regulator_step(cycle_t cycle) {
  if (have_window_) return;

  if (nonempty_req_queues_ == 0) {
    regulator_armed_ = false;
    return;
  }

  bool full = nonempty_req_queues_ == cfg_.window;
  // Once the burst's whole request stream is in the queues, waiting out the
  // timeout would only add a dead tail; forward what is left.
  bool tail = pushed_ == burst_length_;
  bool expired = false;
  if (!full && !tail) {
    if (!regulator_armed_) {
      regulator_armed_ = true;
      regulator_armed_at_ = cycle;
    }
    expired = cycle - regulator_armed_at_ >= cfg_.regulator_timeout;
  }
  if (!(full || tail || expired)) return;

  window_live_.clear();
  for (unsigned w = 0; w < cfg_.window; ++w) {
    auto& fq = req_queues_[w];
    if (fq.empty()) {
      window_valid_[w] = 0;
      continue;
    }
    NarrowRequest req = fq.pop();
    if (fq.empty()) --nonempty_req_queues_;
    COALSIM_CHECK(req.seq % cfg_.window == w);
    window_[w] = req;
    window_valid_[w] = 1;
    window_live_.push_back(static_cast<std::uint16_t>(w));
  }
  have_window_ = true;
  regulator_armed_ = false;
  waiting_since_valid_ = false;
}

void RequestCoalescer::watchdog_step(cycle_t cycle) {
  if (!cshr_.has_tag || cshr_.popcount == 0) return;
  bool end_of_burst = absorbed_ == burst_length_;
  bool timed_out = waiting_since_valid_ &&
                   cycle - waiting_since_ >= cfg_.watchdog_timeout;
  if ((end_of_burst || timed_out) && can_emit()) emit(cycle);
}

void RequestCoalescer::mlpnc_step(cycle_t cycle) {
  // No coalescing: the oldest pending request issues as its own wide access.
  if (staged_.has_value() || hitmap_queue_.full()) return;
  unsigned q = static_cast<unsigned>(nc_next_seq_ % cfg_.window);
  auto& fq = req_queues_[q];
  if (fq.empty() || offsets_queues_[q].full()) return;

  NarrowRequest req = fq.pop();
  if (fq.empty()) --nonempty_req_queues_;
  COALSIM_CHECK(req.seq == nc_next_seq_);
  ++nc_next_seq_;
  ++absorbed_;

  cshr_.has_tag = true;
  cshr_.tag = block_of(req.addr);
  cshr_.popcount = 1;
  set_hitmap_bit(cshr_.hitmap, q);
  cshr_.offsets[q] = static_cast<std::uint8_t>(offset_in_block(req.addr));
  emit(cycle);
}

void RequestCoalescer::watcher_step(cycle_t cycle) {
  if (cfg_.mode == CoalMode::MLPNC) {
    mlpnc_step(cycle);
    return;
  }

  if (have_window_) {
    // Retry an emission that stalled on full metadata queues. The new tag's
    // hits are absorbed next cycle: one absorb generation per cycle.
    if (issue_pending_) {
      if (!can_emit()) return;
      emit(cycle);
      if (!window_live_.empty()) {
        adopt_tag_from_window();
        return;
      }
    }

    if (!window_live_.empty()) {
      if (!cshr_.has_tag) adopt_tag_from_window();

      // Absorb every valid window entry hitting the current tag, in parallel.
      // A slot whose hitmap bit is already set (a duplicate held over from an
      // earlier window) cannot merge into this warp and stays a miss.
      std::vector<std::uint16_t> remaining;
      remaining.reserve(window_live_.size());
      for (std::uint16_t w : window_live_) {
        const NarrowRequest& req = window_[w];
        if (block_of(req.addr) == cshr_.tag && !hitmap_bit(cshr_.hitmap, w)) {
          set_hitmap_bit(cshr_.hitmap, w);
          cshr_.offsets[w] = static_cast<std::uint8_t>(offset_in_block(req.addr));
          ++cshr_.popcount;
          window_valid_[w] = 0;
          ++absorbed_;
        } else {
          remaining.push_back(w);
        }
      }
      window_live_.swap(remaining);

      if (!window_live_.empty()) {
        // Pending misses force the current warp out.
        issue_pending_ = true;
        if (can_emit()) {
          emit(cycle);
          adopt_tag_from_window();
        }
        return;
      }
    }

    // Window exhausted: hold the CSHR for the next window and ask the
    // regulator for more. The watchdog covers a stalling stream.
    have_window_ = false;
    waiting_since_valid_ = true;
    waiting_since_ = cycle;
  }

  // The regulator gets first claim on the cycle; the watchdog only flushes
  // when no new window arrived, so a trickling stream keeps merging into the
  // held CSHR instead of being cut at every timeout.
  regulator_step(cycle);
  if (!have_window_) watchdog_step(cycle);
}

bool RequestCoalescer::try_consume_response(const WideResponse& resp) {
  COALSIM_CHECK(!hitmap_queue_.empty());
  const MetaRecord& rec = hitmap_queue_.front();
  COALSIM_CHECK(rec.tag == resp.addr);

  // Slots deliver independently as their element queues accept; the response
  // is only consumed once every hit slot has been served. Delivering the
  // whole hitmap atomically can deadlock: a full element queue may need this
  // very response's other slots popped before it drains.
  if (resp_delivered_.size() != rec.hitmap.size())
    resp_delivered_.assign(rec.hitmap.size(), 0);
  bool all = true;
  for (unsigned w = 0; w < cfg_.window; ++w) {
    if (!hitmap_bit(rec.hitmap, w) || hitmap_bit(resp_delivered_, w)) continue;
    if (elem_queues_[w].full()) {
      all = false;
      continue;
    }
    std::uint8_t off = offsets_queues_[w].pop();
    std::uint64_t bits = 0;
    for (unsigned b = 0; b < cfg_.elem_width; ++b)
      bits |= static_cast<std::uint64_t>(resp.data[off + b]) << (8 * b);
    elem_queues_[w].push(bits);
    set_hitmap_bit(resp_delivered_, w);
  }
  if (!all) return false;
  hitmap_queue_.pop();
  std::fill(resp_delivered_.begin(), resp_delivered_.end(), 0);
  return true;
}

void RequestCoalescer::downsizer_pop(std::size_t room,
                                     std::vector<OrderedElement>& out) {
  std::size_t width = std::min<std::size_t>(cfg_.intake_width(), room);
  for (std::size_t k = 0; k < width; ++k) {
    if (delivered_ == burst_length_) break;
    unsigned q = static_cast<unsigned>(next_out_seq_ % cfg_.window);
    if (elem_queues_[q].empty()) break;  // order enforcement: oldest seq first
    out.push_back({next_out_seq_, elem_queues_[q].pop()});
    ++next_out_seq_;
    ++delivered_;
  }
}

bool RequestCoalescer::drained() const {
  return delivered_ == burst_length_ && pushed_ == burst_length_ &&
         !staged_.has_value() && hitmap_queue_.empty();
}

}  // namespace coalsim
