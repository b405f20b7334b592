#include "coalsim/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace coalsim {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  auto s = sections.find(section);
  return s != sections.end() && s->second.count(key) > 0;
}

std::string ConfigFile::get(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
  auto s = sections.find(section);
  if (s == sections.end()) return fallback;
  auto k = s->second.find(key);
  return k == s->second.end() ? fallback : k->second;
}

std::uint64_t ConfigFile::get_u64(const std::string& section,
                                  const std::string& key,
                                  std::uint64_t fallback) const {
  std::string v = get(section, key, "");
  if (v.empty()) return fallback;
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad integer for " + section + "." + key +
                             ": '" + v + "'");
  }
}

std::vector<std::string> ConfigFile::get_list(const std::string& section,
                                              const std::string& key) const {
  std::vector<std::string> out;
  std::istringstream is(get(section, key, ""));
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

ConfigFile parse_config(std::istream& in) {
  ConfigFile f;
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw std::runtime_error("config line " + std::to_string(lineno) +
                                 ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      f.sections[section];
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    f.sections[section][key] = val;
  }
  return f;
}

ConfigFile load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config " + path);
  return parse_config(f);
}

SimConfig sim_config_from(const ConfigFile& f) {
  SimConfig c;
  c.coal.window = static_cast<unsigned>(f.get_u64("adapter", "window", 256));
  c.coal.n_ports = static_cast<unsigned>(f.get_u64("adapter", "ports", 4));
  c.coal.upsizer_queue_depth =
      static_cast<unsigned>(f.get_u64("adapter", "upsizer_queue_depth", 2));
  c.coal.downsizer_queue_depth =
      static_cast<unsigned>(f.get_u64("adapter", "downsizer_queue_depth", 2));
  c.coal.hitmap_queue_depth =
      static_cast<unsigned>(f.get_u64("adapter", "hitmap_queue_depth", 128));
  c.coal.offsets_queue_depth =
      static_cast<unsigned>(f.get_u64("adapter", "offsets_queue_depth", 0));
  c.coal.regulator_timeout = f.get_u64("adapter", "regulator_timeout", 64);
  c.coal.watchdog_timeout = f.get_u64("adapter", "watchdog_timeout", 64);
  c.isu.n_ports = c.coal.n_ports;
  c.isu.index_queue_depth =
      static_cast<unsigned>(f.get_u64("adapter", "index_queue_depth", 256));

  c.dram.banks = static_cast<unsigned>(f.get_u64("dram", "banks", 16));
  c.dram.row_bytes = f.get_u64("dram", "row_bytes", 1024);
  c.dram.t_row_hit = f.get_u64("dram", "t_row_hit", 20);
  c.dram.t_row_miss = f.get_u64("dram", "t_row_miss", 44);
  c.dram.scheduler_depth =
      static_cast<unsigned>(f.get_u64("dram", "scheduler_depth", 16));

  c.vps.lanes = static_cast<unsigned>(f.get_u64("vps", "lanes", 16));
  c.vps.l2_bytes = f.get_u64("vps", "l2_bytes", 384 * 1024);
  c.vps.per_slice_overhead = f.get_u64("vps", "per_slice_overhead", 10);
  c.vps.outstanding_prefetches =
      static_cast<unsigned>(f.get_u64("vps", "outstanding_prefetches", 2));

  c.llc.capacity = f.get_u64("llc", "capacity", 1ull << 20);
  c.llc.ways = static_cast<unsigned>(f.get_u64("llc", "ways", 8));
  c.llc.hit_latency = f.get_u64("llc", "hit_latency", 10);
  return c;
}

std::vector<SweepRun> sweep_runs_from(const ConfigFile& f) {
  auto matrices = f.get_list("runs", "matrices");
  auto formats = f.get_list("runs", "formats");
  auto variants = f.get_list("runs", "variants");
  auto windows = f.get_list("runs", "windows");
  auto modes = f.get_list("runs", "modes");
  if (matrices.empty())
    throw std::runtime_error("config: [runs] matrices is required");
  if (formats.empty()) formats = {"sell"};
  if (variants.empty()) variants = {"mlp"};
  if (windows.empty()) windows = {"256"};
  if (modes.empty()) modes = {"stream"};

  std::vector<SweepRun> runs;
  for (const auto& m : matrices)
    for (const auto& fmt : formats)
      for (const auto& v : variants)
        for (const auto& w : windows)
          for (const auto& mode : modes) {
            SweepRun r;
            r.matrix = m;
            r.format = fmt;
            r.variant = v;
            r.window = static_cast<unsigned>(std::stoull(w));
            r.mode = mode;
            runs.push_back(r);
          }
  return runs;
}

std::string default_config_text() {
  return
      "[adapter]\n"
      "window = 256\n"
      "ports = 4\n"
      "index_queue_depth = 256\n"
      "upsizer_queue_depth = 2\n"
      "downsizer_queue_depth = 2\n"
      "hitmap_queue_depth = 128\n"
      "# 0 means 2048 / window\n"
      "offsets_queue_depth = 0\n"
      "regulator_timeout = 64\n"
      "watchdog_timeout = 64\n"
      "\n"
      "[dram]\n"
      "banks = 16\n"
      "row_bytes = 1024\n"
      "t_row_hit = 20\n"
      "t_row_miss = 44\n"
      "scheduler_depth = 16\n"
      "\n"
      "[vps]\n"
      "lanes = 16\n"
      "l2_bytes = 393216\n"
      "per_slice_overhead = 10\n"
      "outstanding_prefetches = 2\n"
      "\n"
      "[llc]\n"
      "capacity = 1048576\n"
      "ways = 8\n"
      "hit_latency = 10\n"
      "\n"
      "[runs]\n"
      "matrices = stencil:16x16x16\n"
      "formats = sell\n"
      "variants = mlpnc mlp seq\n"
      "windows = 256\n"
      "modes = stream\n";
}

}  // namespace coalsim
