#include "coalsim/dram.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace coalsim {

DramChannel::DramChannel(const DramConfig& cfg) : cfg_(cfg) {
  COALSIM_CHECK(cfg_.banks >= 1);
  COALSIM_CHECK(cfg_.row_bytes % kBlockBytes == 0);
  COALSIM_CHECK(cfg_.t_row_hit >= 1 && cfg_.t_row_miss >= 1);
  open_row_.assign(cfg_.banks, -1);
}

void DramChannel::load_image(addr_t base, const std::uint8_t* bytes,
                             std::uint64_t len) {
  if (len == 0) return;
  auto next = image_.lower_bound(base);
  if (next != image_.end() && next->first < base + len)
    throw std::invalid_argument("overlapping DRAM image regions");
  if (next != image_.begin()) {
    auto prev = std::prev(next);
    if (prev->first + prev->second.size() > base)
      throw std::invalid_argument("overlapping DRAM image regions");
  }
  image_.emplace(base, std::vector<std::uint8_t>(bytes, bytes + len));
}

void DramChannel::locate(addr_t addr, unsigned& bank, std::uint64_t& row) const {
  bank = static_cast<unsigned>((addr / cfg_.row_bytes) % cfg_.banks);
  row = addr / (cfg_.row_bytes * cfg_.banks);
}

bool DramChannel::submit(const WideRequest& req, cycle_t cycle) {
  if (req.addr % kBlockBytes != 0)
    throw std::invalid_argument("unaligned wide request");
  if (queue_.size() >= cfg_.scheduler_depth) return false;

  Queued q;
  q.req = req;
  q.req.issue_cycle = cycle;
  q.order = order_counter_++;
  locate(req.addr, q.bank, q.row);
  q.ticket = 0;
  if (!req.is_write) {
    auto& rq = returns_[static_cast<int>(req.category)];
    q.ticket = ticket_counter_[static_cast<int>(req.category)]++;
    rq.push_back(Ticket{req.addr, q.ticket, ~cycle_t{0}});
  }
  queue_.push_back(q);
  return true;
}

void DramChannel::step(cycle_t cycle) {
  if (bus_free_at_ > cycle || queue_.empty()) return;

  // FR-FCFS: oldest row-buffer hit first, otherwise the oldest request.
  std::size_t pick = queue_.size();
  for (std::size_t i = 0; i < queue_.size(); ++i) {
    const Queued& q = queue_[i];
    if (open_row_[q.bank] == static_cast<std::int64_t>(q.row) &&
        (pick == queue_.size() || q.order < queue_[pick].order)) {
      pick = i;
    }
  }
  bool hit = pick != queue_.size();
  if (!hit) {
    pick = 0;
    for (std::size_t i = 1; i < queue_.size(); ++i)
      if (queue_[i].order < queue_[pick].order) pick = i;
  }

  Queued q = queue_[pick];
  queue_.erase(queue_.begin() + static_cast<std::ptrdiff_t>(pick));
  open_row_[q.bank] = static_cast<std::int64_t>(q.row);

  // Row latency from pick; data beats serialize on the bus 2 cycles apart.
  cycle_t done = std::max(cycle + (hit ? cfg_.t_row_hit : cfg_.t_row_miss),
                          last_data_cycle_ + cfg_.bus_cycles);
  last_data_cycle_ = done;
  bus_free_at_ = cycle + cfg_.bus_cycles;
  busy_cycles_ += cfg_.bus_cycles;
  ++picks_;
  bytes_[static_cast<int>(q.req.category)] += kBlockBytes;

  if (!q.req.is_write) {
    auto& rq = returns_[static_cast<int>(q.req.category)];
    COALSIM_CHECK(!rq.empty());
    std::size_t pos = static_cast<std::size_t>(q.ticket - rq.front().id);
    rq[pos].complete_cycle = done;
  }
}

bool DramChannel::response_ready(Category c, cycle_t cycle) const {
  const auto& rq = returns_[static_cast<int>(c)];
  return !rq.empty() && rq.front().done() && rq.front().complete_cycle <= cycle;
}

WideResponse DramChannel::pop_response(Category c, cycle_t cycle) {
  COALSIM_CHECK(response_ready(c, cycle));
  auto& rq = returns_[static_cast<int>(c)];
  Ticket t = rq.front();
  rq.pop_front();
  WideResponse resp;
  resp.addr = t.addr;
  resp.category = c;
  resp.complete_cycle = t.complete_cycle;
  resp.data = read_block(t.addr);
  return resp;
}

bool DramChannel::idle() const {
  if (!queue_.empty()) return false;
  for (const auto& rq : returns_)
    if (!rq.empty()) return false;
  return true;
}

std::uint64_t DramChannel::total_bytes() const {
  std::uint64_t t = 0;
  for (auto b : bytes_) t += b;
  return t;
}

std::array<std::uint8_t, kBlockBytes> DramChannel::read_block(
    addr_t block_addr) const {
  std::array<std::uint8_t, kBlockBytes> out{};
  auto it = image_.upper_bound(block_addr + kBlockBytes - 1);
  while (it != image_.begin()) {
    --it;
    addr_t rbase = it->first;
    addr_t rend = rbase + it->second.size();
    if (rend <= block_addr) break;
    addr_t lo = std::max<addr_t>(block_addr, rbase);
    addr_t hi = std::min<addr_t>(block_addr + kBlockBytes, rend);
    if (lo < hi)
      std::memcpy(out.data() + (lo - block_addr), it->second.data() + (lo - rbase),
                  hi - lo);
  }
  return out;
}

}  // namespace coalsim
