#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "coalsim/binary_cache.hpp"
#include "coalsim/config.hpp"
#include "coalsim/matrix_market.hpp"
#include "coalsim/metrics.hpp"
#include "coalsim/sparse.hpp"
#include "coalsim/system.hpp"

namespace fs = std::filesystem;
using namespace coalsim;

namespace {

// "stencil:NXxNYxNZ" builds a synthetic grid matrix; anything else is a
// Matrix Market path.
CooMatrix resolve_matrix(const std::string& spec) {
  if (spec.rfind("stencil:", 0) == 0) {
    unsigned nx = 0, ny = 0, nz = 0;
    if (std::sscanf(spec.c_str(), "stencil:%ux%ux%u", &nx, &ny, &nz) != 3 ||
        !nx || !ny || !nz)
      throw std::runtime_error("bad stencil spec '" + spec +
                               "' (want stencil:NXxNYxNZ)");
    return gen_stencil27(nx, ny, nz);
  }
  return load_matrix_market(spec);
}

std::string matrix_label(const std::string& spec) {
  if (spec.rfind("stencil:", 0) == 0) return spec;
  return fs::path(spec).filename().string();
}

Workload build_workload(const std::string& spec, const std::string& format,
                        const SimConfig& cfg, const std::string& cache_dir) {
  std::string label = matrix_label(spec);
  std::string cache_path;
  if (!cache_dir.empty() && spec.rfind("stencil:", 0) != 0) {
    cache_path = cache_dir + "/" + label + "." + format + ".bin";
    if (fs::exists(cache_path)) {
      if (format == "sell") {
        return make_workload(load_sell_cache(cache_path), label, cfg.tile_nnz());
      }
      return make_workload(load_csr_cache(cache_path), label, cfg.tile_nnz());
    }
  }

  CsrMatrix csr = coo_to_csr(resolve_matrix(spec));
  if (format == "sell") {
    SellMatrix sell = csr_to_sell(csr, 32);
    if (!cache_path.empty()) save_sell_cache(cache_path, sell);
    return make_workload(sell, label, cfg.tile_nnz());
  }
  if (format != "csr")
    throw std::runtime_error("unknown format '" + format + "'");
  if (!cache_path.empty()) save_csr_cache(cache_path, csr);
  return make_workload(csr, label, cfg.tile_nnz());
}

RunReport do_run(const SweepRun& run, SimConfig cfg,
                 const std::string& cache_dir,
                 std::vector<WideEvent>* events) {
  cfg.coal.window = run.window ? run.window : cfg.coal.window;
  if (run.variant == "base") {
    Workload wl = build_workload(run.matrix, "csr", cfg, cache_dir);
    return baseline_run(wl, cfg);
  }
  auto mode = coal_mode_from_name(run.variant);
  if (!mode) throw std::runtime_error("unknown variant '" + run.variant + "'");
  Workload wl = build_workload(run.matrix, run.format, cfg, cache_dir);
  if (run.mode == "system") return system_run(wl, cfg, *mode, events);
  if (run.mode != "stream")
    throw std::runtime_error("unknown mode '" + run.mode + "'");
  return stream_run(wl, cfg, *mode, events);
}

void write_events_csv(const std::string& path,
                      const std::vector<WideEvent>& events) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << "cycle,tag,popcount,category\n";
  for (const WideEvent& e : events)
    f << e.cycle << ",0x" << std::hex << e.tag << std::dec << ',' << e.popcount
      << ',' << category_name(e.category) << '\n';
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (first) {
      t.header = fields;
      first = false;
    } else {
      t.rows.push_back(fields);
    }
  }
  return t;
}

int cmd_report(const std::string& in_path, const std::string& emit) {
  CsvTable t = read_csv(in_path);
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < t.header.size(); ++i)
      if (t.header[i] == name) return i;
    throw std::runtime_error("missing column " + name + " in " + in_path);
  };
  std::size_t c_matrix = col("matrix"), c_variant = col("variant"),
              c_window = col("window"), c_cycles = col("cycles"),
              c_gbps = col("indirect_gbps"), c_rate = col("coalesce_rate"),
              c_util = col("utilization"), c_ratio = col("traffic_ratio"),
              c_bi = col("bytes_index"), c_be = col("bytes_element");

  if (emit == "summary") {
    std::printf("%-22s %-7s %6s %12s %9s %7s %6s %7s\n", "matrix", "variant",
                "window", "cycles", "GB/s", "rate", "util", "ratio");
    for (const auto& r : t.rows) {
      if (r[c_cycles].rfind("error:", 0) == 0) {
        std::printf("%-22s %-7s %6s  %s\n", r[c_matrix].c_str(),
                    r[c_variant].c_str(), r[c_window].c_str(),
                    r[c_cycles].c_str());
        continue;
      }
      std::printf("%-22s %-7s %6s %12s %9s %7s %6s %7s\n", r[c_matrix].c_str(),
                  r[c_variant].c_str(), r[c_window].c_str(), r[c_cycles].c_str(),
                  r[c_gbps].c_str(), r[c_rate].c_str(), r[c_util].c_str(),
                  r[c_ratio].c_str());
    }
    return 0;
  }
  if (emit == "breakdown") {
    std::printf("%-22s %-7s %6s %11s %11s %11s %7s\n", "matrix", "variant",
                "window", "elem GB/s", "index GB/s", "loss GB/s", "rate");
    for (const auto& r : t.rows) {
      if (r[c_cycles].rfind("error:", 0) == 0) continue;
      double cycles = std::stod(r[c_cycles]);
      if (cycles <= 0) continue;
      double elem = std::stod(r[c_be]) / cycles;
      double index = std::stod(r[c_bi]) / cycles;
      double loss = 32.0 - std::stod(r[c_util]) * 32.0;
      std::printf("%-22s %-7s %6s %11.3f %11.3f %11.3f %7s\n",
                  r[c_matrix].c_str(), r[c_variant].c_str(), r[c_window].c_str(),
                  elem, index, loss, r[c_rate].c_str());
    }
    return 0;
  }
  throw std::runtime_error("unknown --emit '" + emit + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coalsim: near-memory indexing and coalescing simulator"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "single simulation");
  SweepRun run;
  run.format = "sell";
  run.variant = "mlp";
  run.window = 0;
  run.mode = "stream";
  std::string config_path, out_path, events_path, cache_dir;
  unsigned ports = 0;
  std::uint64_t tile_bytes = 0;
  run_cmd->add_option("--matrix", run.matrix,
                      ".mtx path or stencil:NXxNYxNZ")->required();
  run_cmd->add_option("--format", run.format, "csr | sell");
  run_cmd->add_option("--variant", run.variant, "mlpnc | mlp | seq | base");
  run_cmd->add_option("--window", run.window, "coalescer window W");
  run_cmd->add_option("--ports", ports, "parallel ports N");
  run_cmd->add_option("--tile-bytes", tile_bytes, "bytes per L2 array");
  run_cmd->add_option("--mode", run.mode, "stream | system");
  run_cmd->add_option("--config", config_path, "config file");
  run_cmd->add_option("--out", out_path, "CSV output (default stdout)");
  run_cmd->add_option("--events", events_path, "wide-request event log CSV");
  run_cmd->add_option("--cache-dir", cache_dir, "matrix binary cache dir");

  // gen-stencil
  auto* gen_cmd = app.add_subcommand("gen-stencil", "write a 27-point stencil matrix");
  unsigned nx = 0, ny = 0, nz = 0;
  std::string gen_out;
  gen_cmd->add_option("--nx", nx)->required();
  gen_cmd->add_option("--ny", ny)->required();
  gen_cmd->add_option("--nz", nz)->required();
  gen_cmd->add_option("--out", gen_out, "output .mtx path")->required();

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "run a config's matrix x variant grid");
  std::string sweep_config, sweep_out;
  sweep_cmd->add_option("--config", sweep_config, "config file")->required();
  sweep_cmd->add_option("--out", sweep_out, "CSV output")->required();
  sweep_cmd->add_option("--cache-dir", cache_dir, "matrix binary cache dir");

  // report
  auto* report_cmd = app.add_subcommand("report", "summarize a result CSV");
  std::string report_in, report_emit = "summary";
  report_cmd->add_option("--in", report_in, "result CSV")->required();
  report_cmd->add_option("--emit", report_emit, "summary | breakdown");

  // dump-config
  auto* dump_cmd = app.add_subcommand("dump-config", "print the default config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (dump_cmd->parsed()) {
      std::cout << default_config_text();
      return 0;
    }
    if (gen_cmd->parsed()) {
      save_matrix_market(gen_out, gen_stencil27(nx, ny, nz));
      return 0;
    }
    if (report_cmd->parsed()) return cmd_report(report_in, report_emit);

    if (run_cmd->parsed()) {
      SimConfig cfg = config_path.empty() ? SimConfig{}
                                          : sim_config_from(load_config(config_path));
      if (run.window == 0) run.window = cfg.coal.window;
      if (ports) {
        cfg.coal.n_ports = ports;
        cfg.isu.n_ports = ports;
      }
      if (tile_bytes) cfg.vps.l2_bytes = tile_bytes * cfg.vps.arrays;

      std::vector<WideEvent> events;
      RunReport rep = do_run(run, cfg, cache_dir,
                             events_path.empty() ? nullptr : &events);
      if (!events_path.empty()) write_events_csv(events_path, events);

      std::string row = csv_row(0, rep);
      if (out_path.empty()) {
        std::cout << kCsvHeader << '\n' << row << '\n';
      } else {
        std::ofstream f(out_path);
        f << kCsvHeader << '\n' << row << '\n';
      }
      return 0;
    }

    if (sweep_cmd->parsed()) {
      ConfigFile file = load_config(sweep_config);
      SimConfig cfg = sim_config_from(file);
      std::vector<SweepRun> runs = sweep_runs_from(file);
      std::ofstream f(sweep_out);
      if (!f) throw std::runtime_error("cannot open " + sweep_out);
      f << kCsvHeader << '\n';
      bool any_error = false;
      for (std::size_t i = 0; i < runs.size(); ++i) {
        try {
          RunReport rep = do_run(runs[i], cfg, cache_dir, nullptr);
          f << csv_row(i, rep) << '\n';
        } catch (const std::exception& e) {
          // A failing run must not take the sweep down with it.
          f << csv_error_row(i, runs[i].matrix, runs[i].format, runs[i].variant,
                             runs[i].window, e.what())
            << '\n';
          any_error = true;
        }
        f.flush();
      }
      return any_error ? 2 : 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
