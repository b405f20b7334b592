#ifndef COALSIM_BINARY_CACHE_HPP
#define COALSIM_BINARY_CACHE_HPP

#include <string>

#include "coalsim/sparse.hpp"

namespace coalsim {

// Compact binary cache for converted matrices so sweeps skip re-parsing.
// Layout: magic "CSLB", u32 version, u8 kind, then the struct's arrays with
// u64 length prefixes. Not portable across endianness; a cache, not an
// interchange format.

void save_csr_cache(const std::string& path, const CsrMatrix& m);
CsrMatrix load_csr_cache(const std::string& path);

void save_sell_cache(const std::string& path, const SellMatrix& m);
SellMatrix load_sell_cache(const std::string& path);

}  // namespace coalsim

#endif  // COALSIM_BINARY_CACHE_HPP
