#ifndef COALSIM_METRICS_HPP
#define COALSIM_METRICS_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "coalsim/types.hpp"

namespace coalsim {

// Every reported figure derives from these counters.
struct MetricsLedger {
  cycle_t cycles = 0;
  std::array<std::uint64_t, kNumCategories> bytes{};  // INDEX/ELEMENT/CONTIG/RESULT
  std::uint64_t narrow_served = 0;
  std::uint64_t wide_element_accesses = 0;
  std::uint64_t channel_busy_cycles = 0;
  unsigned elem_width = 8;

  std::uint64_t effective_indirect_bytes() const {
    return narrow_served * elem_width;
  }
  std::uint64_t total_bytes() const {
    std::uint64_t t = 0;
    for (auto b : bytes) t += b;
    return t;
  }
};

// rate = effective indirect bytes / bytes requested downstream for elements.
// Exceeds 1.0 under index reuse. Absent when no wide element access happened.
std::optional<double> coalesce_rate(const MetricsLedger& l);

// Effective indirect stream bandwidth; bytes per cycle equals GB/s at the
// fixed 1 GHz clock.
double indirect_bandwidth_gbps(const MetricsLedger& l);

double channel_utilization(const MetricsLedger& l);

// ideal_bytes: every touched 64-byte block moved exactly once.
double traffic_ratio(const MetricsLedger& l, std::uint64_t ideal_bytes);

struct TilePhase {
  cycle_t transfer_start = 0;
  cycle_t transfer_end = 0;
  cycle_t compute_start = 0;
  cycle_t compute_end = 0;
};

struct RunReport {
  std::string matrix;
  std::string format;   // csr | sell
  std::string variant;  // mlpnc | mlp | seq | base
  unsigned window = 0;
  unsigned ports = 0;
  std::string mode;  // stream | system

  MetricsLedger ledger;
  std::uint64_t ideal_bytes = 0;
  cycle_t indirect_cycles = 0;  // time spent transferring the indirect stream

  double indirect_gbps = 0.0;
  std::optional<double> rate;
  double utilization = 0.0;
  double ratio = 0.0;

  std::vector<TilePhase> tiles;                            // system runs
  std::vector<double> y;                                   // system runs
  std::vector<std::array<std::uint64_t, kNumCategories>> pass_bytes;  // base runs

  void derive();  // fill the four derived figures from the ledger
};

// Fixed CSV schema shared by `run` and `sweep`.
extern const char* const kCsvHeader;
std::string csv_row(std::uint64_t run_id, const RunReport& r);
std::string csv_error_row(std::uint64_t run_id, const std::string& matrix,
                          const std::string& format, const std::string& variant,
                          unsigned window, const std::string& message);

}  // namespace coalsim

#endif  // COALSIM_METRICS_HPP
