#include "coalsim/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace coalsim {

std::optional<double> coalesce_rate(const MetricsLedger& l) {
  if (l.wide_element_accesses == 0) return std::nullopt;
  return static_cast<double>(l.effective_indirect_bytes()) /
         (static_cast<double>(l.wide_element_accesses) * kBlockBytes);
}

double indirect_bandwidth_gbps(const MetricsLedger& l) {
  if (l.cycles == 0) return 0.0;
  return static_cast<double>(l.effective_indirect_bytes()) /
         static_cast<double>(l.cycles);
}

double channel_utilization(const MetricsLedger& l) {
  if (l.cycles == 0) return 0.0;
  return static_cast<double>(l.channel_busy_cycles) / static_cast<double>(l.cycles);
}

double traffic_ratio(const MetricsLedger& l, std::uint64_t ideal_bytes) {
  if (ideal_bytes == 0) return 0.0;
  return static_cast<double>(l.total_bytes()) / static_cast<double>(ideal_bytes);
}

void RunReport::derive() {
  indirect_gbps = indirect_bandwidth_gbps(ledger);
  rate = coalesce_rate(ledger);
  utilization = channel_utilization(ledger);
  ratio = traffic_ratio(ledger, ideal_bytes);
}

const char* const kCsvHeader =
    "run_id,matrix,format,variant,window,cycles,bytes_index,bytes_element,"
    "bytes_contig,bytes_result,narrow_served,wide_elem_accesses,indirect_gbps,"
    "coalesce_rate,utilization,traffic_ratio";

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string csv_row(std::uint64_t run_id, const RunReport& r) {
  std::ostringstream os;
  os << run_id << ',' << r.matrix << ',' << r.format << ',' << r.variant << ','
     << r.window << ',' << r.ledger.cycles << ','
     << r.ledger.bytes[static_cast<int>(Category::INDEX)] << ','
     << r.ledger.bytes[static_cast<int>(Category::ELEMENT)] << ','
     << r.ledger.bytes[static_cast<int>(Category::CONTIG)] << ','
     << r.ledger.bytes[static_cast<int>(Category::RESULT)] << ','
     << r.ledger.narrow_served << ',' << r.ledger.wide_element_accesses << ','
     << fmt_double(r.indirect_gbps) << ','
     << (r.rate ? fmt_double(*r.rate) : std::string()) << ','
     << fmt_double(r.utilization) << ',' << fmt_double(r.ratio);
  return os.str();
}

std::string csv_error_row(std::uint64_t run_id, const std::string& matrix,
                          const std::string& format, const std::string& variant,
                          unsigned window, const std::string& message) {
  std::string msg = message;
  for (char& c : msg)
    if (c == ',' || c == '\n') c = ';';
  std::ostringstream os;
  os << run_id << ',' << matrix << ',' << format << ',' << variant << ','
     << window << ",error:" << msg << ",,,,,,,,,,";
  return os.str();
}

}  // namespace coalsim
