#ifndef COALSIM_TYPES_HPP
#define COALSIM_TYPES_HPP

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace coalsim {

using addr_t = std::uint64_t;
using cycle_t = std::uint64_t;
using seq_t = std::uint64_t;

// DRAM access granularity. The whole model is built around 64-byte blocks.
constexpr addr_t kBlockBytes = 64;

inline addr_t block_of(addr_t addr) { return addr & ~(kBlockBytes - 1); }
inline unsigned offset_in_block(addr_t addr) {
  return static_cast<unsigned>(addr & (kBlockBytes - 1));
}
inline addr_t align_down(addr_t addr, addr_t a) { return addr & ~(a - 1); }
inline addr_t align_up(addr_t addr, addr_t a) { return (addr + a - 1) & ~(a - 1); }

inline bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

// Traffic classes accounted separately on the channel.
enum class Category : std::uint8_t { INDEX = 0, ELEMENT = 1, CONTIG = 2, RESULT = 3 };
constexpr int kNumCategories = 4;

inline const char* category_name(Category c) {
  switch (c) {
    case Category::INDEX: return "index";
    case Category::ELEMENT: return "element";
    case Category::CONTIG: return "contig";
    case Category::RESULT: return "result";
  }
  return "?";
}

// Invariant check that stays on in release builds. Simulation state is cheap
// to check and silently-corrupt runs are worthless.
[[noreturn]] inline void check_fail(const char* expr, const char* file, int line) {
  std::fprintf(stderr, "check failed: %s (%s:%d)\n", expr, file, line);
  std::abort();
}

#define COALSIM_CHECK(expr) \
  do { \
    if (!(expr)) ::coalsim::check_fail(#expr, __FILE__, __LINE__); \
  } while (0)

}  // namespace coalsim

#endif  // COALSIM_TYPES_HPP
