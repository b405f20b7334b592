#include "coalsim/llc.hpp"

namespace coalsim {

Llc::Llc(const LlcConfig& cfg) : cfg_(cfg) {
  COALSIM_CHECK(cfg_.line >= 1 && is_pow2(cfg_.line));
  COALSIM_CHECK(cfg_.ways >= 1);
  COALSIM_CHECK(cfg_.capacity % (static_cast<std::uint64_t>(cfg_.line) * cfg_.ways) == 0);
  sets_ = static_cast<unsigned>(cfg_.capacity / cfg_.line / cfg_.ways);
  COALSIM_CHECK(is_pow2(sets_));
  lines_.assign(static_cast<std::size_t>(sets_) * cfg_.ways, Line{});
}

Llc::Result Llc::access(addr_t addr, bool write) {
  addr_t line_addr = addr / cfg_.line;
  unsigned set = static_cast<unsigned>(line_addr & (sets_ - 1));
  addr_t tag = line_addr >> __builtin_ctz(sets_);
  Line* base = &lines_[static_cast<std::size_t>(set) * cfg_.ways];

  Result res;
  ++tick_;
  for (unsigned w = 0; w < cfg_.ways; ++w) {
    Line& l = base[w];
    if (l.valid && l.tag == tag) {
      l.stamp = tick_;
      l.dirty |= write;
      ++hits_;
      res.hit = true;
      return res;
    }
  }

  ++misses_;
  unsigned victim = 0;
  for (unsigned w = 0; w < cfg_.ways; ++w) {
    if (!base[w].valid) {
      victim = w;
      break;
    }
    if (base[w].stamp < base[victim].stamp) victim = w;
  }
  Line& v = base[victim];
  if (v.valid && v.dirty) {
    res.writeback = true;
    res.writeback_addr =
        ((v.tag << __builtin_ctz(sets_)) | set) * cfg_.line;
    ++writebacks_;
  }
  v.valid = true;
  v.dirty = write;
  v.tag = tag;
  v.stamp = tick_;
  return res;
}

std::vector<addr_t> Llc::drain_dirty() {
  std::vector<addr_t> out;
  for (unsigned set = 0; set < sets_; ++set)
    for (unsigned w = 0; w < cfg_.ways; ++w) {
      Line& l = lines_[static_cast<std::size_t>(set) * cfg_.ways + w];
      if (l.valid && l.dirty) {
        out.push_back(((l.tag << __builtin_ctz(sets_)) | set) * cfg_.line);
        l.dirty = false;
      }
    }
  return out;
}

}  // namespace coalsim
