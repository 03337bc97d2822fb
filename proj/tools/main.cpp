#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clicksim/config.hpp"
#include "clicksim/errors.hpp"
#include "clicksim/exact.hpp"
#include "clicksim/montecarlo.hpp"
#include "clicksim/stats.hpp"
#include "clicksim/sweeps.hpp"

namespace {

using namespace clicksim;

// Grid syntax: "a,b,c" or "lo:hi:step" (inclusive endpoints).
std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  auto parse_one = [&](const std::string& item) {
    std::size_t pos = 0;
    double v;
    try {
      v = std::stod(item, &pos);
    } catch (...) {
      pos = 0;
    }
    if (pos != item.size() || item.empty())
      throw ConfigError("grid: '" + item + "' is not a number");
    return v;
  };
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i)
      if (i == s.size() || s[i] == ':') {
        parts.push_back(s.substr(start, i - start));
        start = i + 1;
      }
    if (parts.size() != 3)
      throw ConfigError("grid: expected lo:hi:step, got '" + s + "'");
    const double lo = parse_one(parts[0]);
    const double hi = parse_one(parts[1]);
    const double step = parse_one(parts[2]);
    if (step <= 0 || hi < lo)
      throw ConfigError("grid: need step > 0 and hi >= lo in '" + s + "'");
    const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) out.push_back(lo + i * step);
    return out;
  }
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == ',') {
      out.push_back(parse_one(s.substr(start, i - start)));
      start = i + 1;
    }
  return out;
}

std::vector<int> parse_int_grid(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_grid(s)) {
    const int i = static_cast<int>(std::llround(v));
    if (std::abs(v - i) > 1e-9)
      throw ConfigError("grid: '" + std::to_string(v) + "' is not an integer");
    out.push_back(i);
  }
  return out;
}

// Engine options shared by the sweep subcommands.
struct EngineFlags {
  std::string engine = "exact";
  std::uint64_t trials = 1000000;
  std::uint64_t seed = 1;
  int workers = 1;
  int n_max = kDefaultNMax;
  double tail_tol = 1e-2;
  int resamples = 100;
};

void add_engine_flags(CLI::App* cmd, EngineFlags& f) {
  cmd->add_option("--engine", f.engine, "computation engine")
      ->check(CLI::IsMember({"exact", "mc"}))
      ->capture_default_str();
  cmd->add_option("--trials", f.trials, "Monte Carlo trials per point")
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "root seed")->capture_default_str();
  cmd->add_option("--workers", f.workers, "worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--n-max", f.n_max, "photon-number truncation")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--tail-tol", f.tail_tol, "largest tolerated truncated mass")
      ->capture_default_str();
  cmd->add_option("--resamples", f.resamples,
                  "bootstrap resamples for MC stderr, 0 disables")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

SweepEngine to_sweep_engine(const EngineFlags& f) {
  SweepEngine eng;
  eng.engine = f.engine == "mc" ? EngineKind::MonteCarlo : EngineKind::Exact;
  eng.trials = f.trials;
  eng.seed = f.seed;
  eng.workers = f.workers;
  eng.n_max = f.n_max;
  eng.tail_tol = f.tail_tol;
  eng.resamples = f.resamples;
  return eng;
}

void print_report(const PhotonNumberDistribution& pnd,
                  const MultiplexConfig& mux, const ClickStatistics& stats,
                  const QReport& report, std::uint64_t trials,
                  std::uint64_t seed) {
  std::printf("modes        %d\n", report.n_modes);
  std::printf("engine       %s\n",
              report.provenance == Provenance::Exact ? "exact" : "mc");
  if (report.provenance == Provenance::MonteCarlo) {
    std::printf("trials       %llu\n",
                static_cast<unsigned long long>(trials));
    std::printf("seed         %llu\n", static_cast<unsigned long long>(seed));
  }
  std::printf("tail_mass    %s\n", fmt17(pnd.tail_mass).c_str());
  for (std::size_t k = 0; k < stats.c.size(); ++k)
    std::printf("c[%zu]         %s\n", k, fmt17(stats.c[k]).c_str());
  for (std::size_t j = 0; j < stats.p.size(); ++j)
    std::printf("p[%zu]         %s\n", j + 1, fmt17(stats.p[j]).c_str());
  std::printf("mean_c       %s\n", fmt17(stats.mean_c).c_str());
  std::printf("var_c        %s\n", fmt17(stats.var_c).c_str());
  std::printf("m            %s\n", fmt17(stats.m).c_str());
  std::printf("sigma_sq     %s\n", fmt17(stats.sigma_sq).c_str());
  if (report.q_m)
    std::printf("q_m          %s\n", fmt17(*report.q_m).c_str());
  std::printf("q_b          %s\n", fmt17(report.q_b).c_str());
  std::printf("q_pb         %s\n", fmt17(report.q_pb).c_str());
  if (report.stderr_pb)
    std::printf("stderr_pb    %s\n", fmt17(*report.stderr_pb).c_str());
  (void)mux;
}

struct CommonCmdFlags {
  std::string config_path;
  std::string out_path;
  std::string engine;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  int workers = 0;
  bool keep_raw = false;
  int resamples = -1;
};

void add_config_flags(CLI::App* cmd, CommonCmdFlags& f, bool out_required) {
  cmd->add_option("--config", f.config_path, "experiment config file")
      ->required();
  auto* out = cmd->add_option("--out", f.out_path, "output CSV path");
  if (out_required) out->required();
  cmd->add_option("--engine", f.engine, "override [engine] type")
      ->check(CLI::IsMember({"exact", "mc"}));
  cmd->add_option("--trials", f.trials, "override [engine] trials");
  cmd->add_option("--seed", f.seed, "override [engine] seed");
  cmd->add_option("--workers", f.workers, "override [engine] workers")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--keep-raw", f.keep_raw, "retain per-trial click masks");
  cmd->add_option("--bootstrap", f.resamples,
                  "bootstrap resamples for the MC stderr (0 disables)");
}

ExperimentConfig load_config(const CLI::App* cmd, const CommonCmdFlags& f) {
  ExperimentConfig cfg = parse_config_file(f.config_path);
  if (cmd->count("--engine"))
    cfg.engine = f.engine == "mc" ? EngineKind::MonteCarlo : EngineKind::Exact;
  if (cmd->count("--trials")) cfg.trials = f.trials;
  if (cmd->count("--seed")) cfg.seed = f.seed;
  if (cmd->count("--workers")) cfg.workers = f.workers;
  if (cmd->count("--keep-raw")) cfg.keep_raw = true;
  return cfg;
}

int run_analyze(const CLI::App* cmd, const CommonCmdFlags& f) {
  const ExperimentConfig cfg = load_config(cmd, f);
  const PhotonNumberDistribution pnd = build_source(cfg);
  const MultiplexConfig mux = build_network(cfg);
  const DetectorConfig det = build_detector(cfg, mux.n_modes());
  validate_pair(mux, det);

  const int resamples = f.resamples < 0 ? 100 : f.resamples;
  QReport report;
  report.n_modes = mux.n_modes();
  ClickStatistics stats;
  std::optional<ClickTable> table;
  if (cfg.engine == EngineKind::Exact) {
    stats = exact_click_statistics(pnd, mux, det);
    report.provenance = Provenance::Exact;
  } else {
    RunOptions opts;
    opts.workers = cfg.workers;
    opts.keep_raw = cfg.keep_raw || resamples > 0;
    table = run_experiment(pnd, mux, det, cfg.trials, cfg.seed, opts);
    stats = estimate_statistics(*table);
    report.provenance = Provenance::MonteCarlo;
  }
  report.q_b = binomial_q(stats, mux.n_modes());
  report.q_pb = poisson_binomial_q(stats, mux.n_modes());
  if (table && resamples > 0)
    report.stderr_pb =
        bootstrap_stderr(*table, Statistic::PoissonBinomialQ, resamples,
                         SplitMix64::for_stream(cfg.seed, 0x626f6f74ull)
                             .next_u64());
  const Moments mom = moments(pnd);
  if (mom.mean > 0) report.q_m = mandel_q(mom.mean, mom.variance);

  print_report(pnd, mux, stats, report, cfg.trials, cfg.seed);
  if (!f.out_path.empty()) write_analysis_csv(f.out_path, stats, report);
  return 0;
}

int run_table(const CLI::App* cmd, const CommonCmdFlags& f) {
  ExperimentConfig cfg = load_config(cmd, f);
  if (cfg.engine != EngineKind::MonteCarlo)
    throw ConfigError(
        "the table command samples per-trial rows and needs the Monte Carlo "
        "engine (--engine mc)");
  const PhotonNumberDistribution pnd = build_source(cfg);
  const MultiplexConfig mux = build_network(cfg);
  const DetectorConfig det = build_detector(cfg, mux.n_modes());
  validate_pair(mux, det);
  RunOptions opts;
  opts.keep_raw = true;
  opts.workers = cfg.workers;
  const ClickTable table =
      run_experiment(pnd, mux, det, cfg.trials, cfg.seed, opts);
  write_click_table_csv(f.out_path, table);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Click statistics of multiplexed on-off photon detectors"};
  app.require_subcommand(1);

  CommonCmdFlags analyze_flags;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "run one experiment and report its click statistics");
  add_config_flags(analyze, analyze_flags, /*out_required=*/false);

  CommonCmdFlags table_flags;
  CLI::App* table = app.add_subcommand(
      "table", "sample a raw per-trial click table (Monte Carlo)");
  add_config_flags(table, table_flags, /*out_required=*/true);

  // sweep-mean: witnesses vs mean photon number through one fixed network.
  MeanSweepOptions mean_opt;
  EngineFlags mean_eng;
  std::string mean_nbar, mean_fock, mean_out;
  CLI::App* sweep_mean = app.add_subcommand(
      "sweep-mean", "sweep Q_PB over the source mean photon number");
  sweep_mean->add_option("--out", mean_out, "output CSV path")->required();
  sweep_mean->add_option("--kappa", mean_opt.kappa, "ring coupling")
      ->capture_default_str();
  sweep_mean->add_option("--eta", mean_opt.eta, "detector efficiency")
      ->capture_default_str();
  sweep_mean->add_option("--nu", mean_opt.nu, "dark-count rate")
      ->capture_default_str();
  sweep_mean->add_option("--ntrc", mean_opt.n_trc, "number of pulses")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep_mean->add_option("--nbar", mean_nbar,
                         "mean grid, 'a,b,c' or 'lo:hi:step'");
  sweep_mean->add_option("--fock", mean_fock, "Fock m grid");
  add_engine_flags(sweep_mean, mean_eng);

  // sweep-detection: Q_PB over the (eta, n_trc) grid for the quantum states.
  DetectionSweepOptions det_opt;
  EngineFlags det_eng;
  std::string det_eta, det_ntrc, det_fock, det_odd, det_out;
  CLI::App* sweep_det = app.add_subcommand(
      "sweep-detection", "sweep Q_PB over efficiency and pulse count");
  sweep_det->add_option("--out", det_out, "output CSV path")->required();
  sweep_det->add_option("--kappa", det_opt.kappa, "ring coupling")
      ->capture_default_str();
  sweep_det->add_option("--nu", det_opt.nu, "dark-count rate")
      ->capture_default_str();
  sweep_det->add_option("--eta-grid", det_eta, "efficiency grid");
  sweep_det->add_option("--ntrc-grid", det_ntrc, "pulse-count grid");
  sweep_det->add_option("--fock", det_fock, "Fock m grid");
  sweep_det->add_option("--odd-nbar", det_odd, "odd-coherent mean grid");
  add_engine_flags(sweep_det, det_eng);

  // sweep-spats: photon-added thermal state over its thermal occupation.
  SpatsSweepOptions spats_opt;
  EngineFlags spats_eng;
  std::string spats_nth, spats_eta, spats_ntrc, spats_out;
  CLI::App* sweep_spats = app.add_subcommand(
      "sweep-spats", "sweep the photon-added thermal state over n_th");
  sweep_spats->add_option("--out", spats_out, "output CSV path")->required();
  sweep_spats->add_option("--kappa", spats_opt.kappa, "ring coupling")
      ->capture_default_str();
  sweep_spats->add_option("--nu", spats_opt.nu, "dark-count rate")
      ->capture_default_str();
  sweep_spats->add_option("--nth-grid", spats_nth, "thermal occupation grid");
  sweep_spats->add_option("--eta-grid", spats_eta, "efficiency grid");
  sweep_spats->add_option("--ntrc-grid", spats_ntrc, "pulse-count grid");
  add_engine_flags(sweep_spats, spats_eng);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(analyze)) return run_analyze(analyze, analyze_flags);
    if (app.got_subcommand(table)) return run_table(table, table_flags);
    if (app.got_subcommand(sweep_mean)) {
      if (!mean_nbar.empty()) mean_opt.nbar_grid = parse_grid(mean_nbar);
      if (!mean_fock.empty()) mean_opt.fock_grid = parse_int_grid(mean_fock);
      mean_opt.engine = to_sweep_engine(mean_eng);
      run_mean_sweep(mean_out, mean_opt);
      return 0;
    }
    if (app.got_subcommand(sweep_det)) {
      if (!det_eta.empty()) det_opt.eta_grid = parse_grid(det_eta);
      if (!det_ntrc.empty()) det_opt.n_trc_grid = parse_int_grid(det_ntrc);
      if (!det_fock.empty()) det_opt.fock_grid = parse_int_grid(det_fock);
      if (!det_odd.empty()) det_opt.odd_nbar_grid = parse_grid(det_odd);
      det_opt.engine = to_sweep_engine(det_eng);
      run_detection_sweep(det_out, det_opt);
      return 0;
    }
    if (app.got_subcommand(sweep_spats)) {
      if (!spats_nth.empty()) spats_opt.n_th_grid = parse_grid(spats_nth);
      if (!spats_eta.empty()) spats_opt.eta_grid = parse_grid(spats_eta);
      if (!spats_ntrc.empty())
        spats_opt.n_trc_grid = parse_int_grid(spats_ntrc);
      spats_opt.engine = to_sweep_engine(spats_eng);
      run_spats_sweep(spats_out, spats_opt);
      return 0;
    }
  } catch (const DegenerateStatisticsError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const TailToleranceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ModeCountError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
  return 0;
}
