#ifndef COALSIM_LLC_HPP
#define COALSIM_LLC_HPP

#include <cstdint>
#include <vector>

#include "coalsim/types.hpp"

namespace coalsim {

struct LlcConfig {
  std::uint64_t capacity = 1ull << 20;  // 1 MiB
  unsigned line = 64;
  unsigned ways = 8;
  cycle_t hit_latency = 10;
};

// Set-associative LRU cache, write-back / write-allocate. Timing and traffic
// only; data flows through the workload arrays.
class Llc {
 public:
  struct Result {
    bool hit = false;
    bool writeback = false;
    addr_t writeback_addr = 0;
  };

  explicit Llc(const LlcConfig& cfg);

  Result access(addr_t addr, bool write);

  // Dirty lines remaining, cleared; used to flush at end of run.
  std::vector<addr_t> drain_dirty();

  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }
  std::uint64_t writebacks() const { return writebacks_; }
  unsigned sets() const { return sets_; }
  const LlcConfig& config() const { return cfg_; }

 private:
  struct Line {
    addr_t tag = 0;
    bool valid = false;
    bool dirty = false;
    std::uint64_t stamp = 0;
  };

  LlcConfig cfg_;
  unsigned sets_;
  std::vector<Line> lines_;  // sets_ x ways
  std::uint64_t tick_ = 0;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
  std::uint64_t writebacks_ = 0;
};

}  // namespace coalsim

#endif  // COALSIM_LLC_HPP
