// uwfd: run single links, sweeps, plots and the built-in self test.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "svg_plot.hpp"
#include "uwfd/config.hpp"
#include "uwfd/csv.hpp"
#include "uwfd/experiments.hpp"
#include "uwfd/selftest.hpp"

namespace fs = std::filesystem;
using namespace uwfd;

namespace {

enum Exit { kOk = 0, kConfigError = 1, kRuntimeError = 2, kSelftestFailure = 3 };

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> modes;
  std::optional<std::size_t> symbols;
  bool quiet = false;
  std::vector<std::string> inputs;  // plot only
};

class Log {
 public:
  explicit Log(bool quiet) : quiet_(quiet) {}
  template <typename... Args>
  void info(const Args&... args) const {
    if (quiet_) return;
    (std::cerr << ... << args) << '\n';
  }

 private:
  bool quiet_;
};

/// Files created by this invocation; removed unless commit() is called.
class Outputs {
 public:
  fs::path add(fs::path p) {
    created_.push_back(p);
    return p;
  }
  void commit() { created_.clear(); }
  const std::vector<fs::path>& files() const { return created_; }
  ~Outputs() {
    std::error_code ec;
    for (const auto& p : created_) fs::remove(p, ec);
  }

 private:
  std::vector<fs::path> created_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::map<std::string, std::string> config_values(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> out;
  std::istringstream in(to_config_text(cfg));
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos && line[0] != '#') out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

ExperimentConfig load(const Options& opt, const Log& log) {
  if (opt.config.empty()) throw ConfigError("config", "--config is required");
  std::vector<std::string> defaulted;
  auto cfg = parse_config(opt.config, &defaulted);
  if (!defaulted.empty()) {
    const auto values = config_values(cfg);
    for (const auto& key : defaulted) log.info("default ", key, " = ", values.at(key));
  }
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.symbols) cfg.symbols = *opt.symbols;
  if (!opt.modes.empty()) {
    cfg.modes.clear();
    for (const auto& m : opt.modes) {
      try {
        cfg.modes.push_back(parse_mode(m));
      } catch (const InvalidArgument& e) {
        throw ConfigError("mode", e.what());
      }
    }
  }
  cfg.validate();
  return cfg;
}

std::string stem_of(const Options& opt) { return fs::path(opt.config).stem().string(); }

fs::path output_dir(const Options& opt) {
  fs::path dir(opt.out);
  fs::create_directories(dir);
  return dir;
}

void summarize(const SweepTable& table, const Log& log) {
  for (const auto& r : table) {
    std::ostringstream os;
    os.precision(4);
    os << to_string(r.mode) << " @ " << r.sweep_value << ": ber " << r.ber << " (" << r.errors << '/' << r.symbols
       << (r.reliable() ? "" : ", unreliable") << "), rho_c_hat " << r.rho_c_hat << ", rho_h_hat " << r.rho_h_hat
       << ", rho_h_bar " << r.rho_h_bar << ", rho_r_hat " << r.rho_r_hat;
    log.info(os.str());
  }
}

int cmd_run(const Options& opt) {
  const Log log(opt.quiet);
  const auto cfg = load(opt, log);
  const auto point = config_at(cfg, cfg.sweep_coordinate());
  std::vector<RunResult> runs;
  for (int t = 0; t < cfg.trials; ++t)
    runs.push_back(run_link(point, cfg.modes, derive_run_seed(cfg.seed, 0, static_cast<std::size_t>(t))));
  const auto table = aggregate(runs, cfg.sweep_coordinate(), cfg.seed, cfg.modes);

  Outputs outputs;
  const auto dir = output_dir(opt);
  write_sweep_csv(outputs.add(dir / (stem_of(opt) + ".csv")), table);
  for (const auto& m : runs.front().modes)
    if (!m.trajectory.empty())
      write_trajectory_csv(
          outputs.add(dir / (stem_of(opt) + "_trajectory_" + std::string(to_string(m.mode)) + ".csv")),
          m.trajectory);
  summarize(table, log);
  for (const auto& f : outputs.files()) log.info("wrote ", f.string());
  outputs.commit();
  return kOk;
}

int cmd_sweep(const Options& opt) {
  const Log log(opt.quiet);
  const auto cfg = load(opt, log);
  log.info("sweeping ", cfg.sweep_grid.empty() ? 1 : cfg.sweep_grid.size(), " point(s) x ", cfg.trials,
           " trial(s) x ", cfg.symbols, " symbols");
  const auto table = sweep(cfg);
  Outputs outputs;
  const auto dir = output_dir(opt);
  write_sweep_csv(outputs.add(dir / (stem_of(opt) + ".csv")), table);
  summarize(table, log);
  for (const auto& f : outputs.files()) log.info("wrote ", f.string());
  outputs.commit();
  return kOk;
}

std::vector<ReceiverMode> modes_in(const SweepTable& table) {
  std::vector<ReceiverMode> modes;
  for (const auto& r : table)
    if (std::find(modes.begin(), modes.end(), r.mode) == modes.end()) modes.push_back(r.mode);
  return modes;
}

plot::Series metric_series(const SweepTable& table, ReceiverMode mode, double SweepRow::*field, bool flag_ber) {
  plot::Series s;
  s.label = std::string(to_string(mode));
  s.dashed = mode == ReceiverMode::Ideal;
  for (const auto& r : table) {
    if (r.mode != mode) continue;
    s.x.push_back(r.sweep_value);
    s.y.push_back(r.*field);
    s.hollow.push_back(flag_ber && !r.reliable());
  }
  return s;
}

plot::Panel ber_panel(const SweepTable& table, const std::string& xlabel) {
  plot::Panel p{"BER (hollow markers: fewer than 20 errors)", xlabel, "BER", true, {}};
  for (auto m : modes_in(table)) p.series.push_back(metric_series(table, m, &SweepRow::ber, true));
  return p;
}

plot::Panel residual_panel(const SweepTable& table, const std::string& xlabel) {
  plot::Panel p{"Normalized residual after SI cancellation", xlabel, "rho_r_hat", true, {}};
  for (auto m : modes_in(table)) p.series.push_back(metric_series(table, m, &SweepRow::rho_r_hat, false));
  return p;
}

std::vector<plot::Panel> trajectory_panels(const std::vector<TrajectorySample>& samples) {
  // Decimate to keep the SVG small; every sample is still in the CSV.
  const std::size_t stride = std::max<std::size_t>(1, samples.size() / 4000);
  plot::Series amp[3], phase[3];
  const char* names[] = {"true", "estimated", "damped"};
  for (int k = 0; k < 3; ++k) {
    amp[k].label = phase[k].label = names[k];
    amp[k].markers = phase[k].markers = false;
  }
  for (std::size_t i = 0; i < samples.size(); i += stride) {
    const auto& s = samples[i];
    const cdouble v[] = {s.truth, s.estimated, s.damped};
    for (int k = 0; k < 3; ++k) {
      amp[k].x.push_back(static_cast<double>(s.n));
      amp[k].y.push_back(std::abs(v[k]));
      phase[k].x.push_back(static_cast<double>(s.n));
      phase[k].y.push_back(std::arg(v[k]));
    }
  }
  plot::Panel a{"Tap amplitude", "symbol index n", "|tap|", false, {}};
  plot::Panel p{"Tap phase", "symbol index n", "phase (rad)", false, {}};
  for (int k : {1, 2, 0}) {
    a.series.push_back(amp[k]);
    p.series.push_back(phase[k]);
  }
  return {a, p};
}

bool is_trajectory_csv(const fs::path& path) {
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  return header == kTrajectoryCsvHeader;
}

std::vector<plot::Panel> panels_for_file(const fs::path& csv) {
  if (is_trajectory_csv(csv)) return trajectory_panels(read_trajectory_csv(csv));
  const auto table = read_sweep_csv(csv);
  return {ber_panel(table, "sweep value (dB)"), residual_panel(table, "sweep value (dB)")};
}

int cmd_plot(const Options& opt) {
  const Log log(opt.quiet);
  Outputs outputs;
  if (opt.config.empty() && opt.inputs.empty())
    throw ConfigError("config", "plot needs --config or one or more CSV files");
  const auto dir = output_dir(opt);
  if (!opt.config.empty()) {
    const auto cfg = load(opt, log);
    const auto stem = stem_of(opt);
    const fs::path sweep_csv = dir / (stem + ".csv");
    std::vector<plot::Panel> panels;
    if (cfg.capture_tap >= 0 && cfg.sweep_axis == SweepAxis::None) {
      fs::path traj;
      for (auto m : cfg.modes) {
        const auto candidate = dir / (stem + "_trajectory_" + std::string(to_string(m)) + ".csv");
        if (fs::exists(candidate)) {
          traj = candidate;
          break;
        }
      }
      if (traj.empty()) throw std::runtime_error("no trajectory CSV for " + stem + " in " + dir.string());
      panels = trajectory_panels(read_trajectory_csv(traj));
      panels[0].title = "Remote tap " + std::to_string(cfg.capture_tap) + " amplitude";
      panels[1].title = "Remote tap " + std::to_string(cfg.capture_tap) + " phase";
    } else {
      const auto table = read_sweep_csv(sweep_csv);
      std::ostringstream title;
      if (cfg.sweep_axis == SweepAxis::SiPower) {
        panels.push_back(residual_panel(table, "P_s / P_r (dB)"));
        title << "rho_r_hat vs P_s/P_r, remote SNR " << cfg.pr_db - cfg.noise_db << " dB";
      } else {
        panels.push_back(ber_panel(table, cfg.sweep_axis == SweepAxis::Snr ? "remote SNR (dB)" : "sweep value (dB)"));
        title << "BER vs remote SNR, P_s/P_r = " << cfg.ps_db - cfg.pr_db << " dB";
      }
      panels[0].title = title.str();
    }
    write_text(outputs.add(dir / (stem + ".svg")), plot::render(panels));
  }
  for (const auto& in : opt.inputs) {
    const fs::path csv(in);
    write_text(outputs.add(dir / (csv.stem().string() + ".svg")), plot::render(panels_for_file(csv)));
  }
  for (const auto& f : outputs.files()) log.info("wrote ", f.string());
  outputs.commit();
  return kOk;
}

int cmd_selftest(const Options& opt) {
  bool ok = true;
  for (const auto& r : run_selftest()) {
    ok = ok && r.passed;
    if (!opt.quiet || !r.passed) std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
  }
  std::cout << (ok ? "selftest passed" : "selftest FAILED") << '\n';
  return ok ? kOk : kSelftestFailure;
}

void add_common(CLI::App* app, Options& opt, bool needs_config) {
  auto* c = app->add_option("--config", opt.config, "Experiment configuration file");
  if (needs_config) c->required();
  app->add_option("--out", opt.out, "Output directory")->capture_default_str();
  app->add_option("--seed", opt.seed, "Override the configured root seed");
  app->add_option("--mode", opt.modes, "Receiver modes: proposed, conventional, ideal")->delimiter(',');
  app->add_option("--symbols", opt.symbols, "Override the run length in symbols");
  app->add_flag("--quiet", opt.quiet, "Only report errors");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Link-level simulator for full-duplex underwater acoustic links"};
  app.require_subcommand(1);
  Options opt;
  auto* run = app.add_subcommand("run", "Run the configured point and write <out>/<name>.csv");
  auto* sw = app.add_subcommand("sweep", "Sweep the configured grid and write <out>/<name>.csv");
  auto* pl = app.add_subcommand("plot", "Render result CSVs as SVG");
  auto* st = app.add_subcommand("selftest", "Run the built-in reference checks");
  add_common(run, opt, true);
  add_common(sw, opt, true);
  add_common(pl, opt, false);
  pl->add_option("csv", opt.inputs, "Result CSV files to plot")->check(CLI::ExistingFile);
  st->add_flag("--quiet", opt.quiet, "Only report failures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(opt);
    if (*sw) return cmd_sweep(opt);
    if (*pl) return cmd_plot(opt);
    return cmd_selftest(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
