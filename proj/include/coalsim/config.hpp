#ifndef COALSIM_CONFIG_HPP
#define COALSIM_CONFIG_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coalsim/coalescer.hpp"
#include "coalsim/dram.hpp"
#include "coalsim/isu.hpp"
#include "coalsim/llc.hpp"
#include "coalsim/types.hpp"

namespace coalsim {

struct VpsConfig {
  unsigned lanes = 16;
  std::uint64_t l2_bytes = 384 * 1024;
  unsigned arrays = 6;  // equal L2 partitions
  cycle_t per_slice_overhead = 10;
  unsigned outstanding_prefetches = 2;

  std::uint64_t tile_bytes() const { return l2_bytes / arrays; }
};

struct SimConfig {
  IsuConfig isu;
  CoalescerConfig coal;
  DramConfig dram;
  VpsConfig vps;
  LlcConfig llc;

  // Packed entries per tile, each value 8 bytes wide.
  std::uint64_t tile_nnz() const { return vps.tile_bytes() / 8; }
};

// Sections and raw key/value pairs of a config file.
struct ConfigFile {
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::uint64_t fallback) const;
  std::vector<std::string> get_list(const std::string& section,
                                    const std::string& key) const;
};

ConfigFile parse_config(std::istream& in);
ConfigFile load_config(const std::string& path);

// Apply [adapter], [dram], [vps], [llc] sections over Table-style defaults.
SimConfig sim_config_from(const ConfigFile& f);

// One sweep element, the cartesian product of the [runs] lists.
struct SweepRun {
  std::string matrix;
  std::string format;   // csr | sell
  std::string variant;  // mlpnc | mlp | seq | base
  unsigned window = 256;
  std::string mode;  // stream | system
};

std::vector<SweepRun> sweep_runs_from(const ConfigFile& f);

// Default config text with all defaults spelled out, for `--dump-config`.
std::string default_config_text();

}  // namespace coalsim

#endif  // COALSIM_CONFIG_HPP
