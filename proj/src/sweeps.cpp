#include "clicksim/sweeps.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <thread>

#include "clicksim/errors.hpp"
#include "clicksim/exact.hpp"

namespace clicksim {

namespace {

// Runs fn(0..n-1) on up to `workers` threads.  The caller owns ordering:
// tasks write into preallocated slots, never to shared output.
void run_indexed(int workers, int n, const std::function<void(int)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int n_threads = std::min(workers, n);
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(n_threads);
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Seed for sweep point `row`, decorrelated from the trial streams that
// run_experiment derives per trial.
std::uint64_t point_seed(std::uint64_t root, std::uint64_t row) {
  return SplitMix64::for_stream(root, 0x706f696e74ull + row).next_u64();
}

std::uint64_t bootstrap_seed(std::uint64_t pseed) {
  return SplitMix64::for_stream(pseed, 0x626f6f74ull).next_u64();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path + ": cannot open for writing");
  return out;
}

std::string basename_of(const std::string& path) {
  const std::size_t slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

const char* family_name(StateFamily f) {
  switch (f) {
    case StateFamily::Coherent: return "coherent";
    case StateFamily::Thermal: return "thermal";
    case StateFamily::Fock: return "fock";
    case StateFamily::OddCoherent: return "odd_coherent";
    case StateFamily::Spats: return "spats";
    case StateFamily::Custom: return "custom";
  }
  return "?";
}

// Odd coherent states only exist for mean > 1; the n̄ = 1 row is the
// vanishing-amplitude limit, represented by a tiny |alpha|^2.
PhotonNumberDistribution odd_coherent_for_mean(double nbar, int n_max,
                                               double tail_tol) {
  const double a2 =
      nbar <= 1.0 + 1e-12 ? 1e-8 : solve_odd_coherent_alpha(nbar);
  return odd_coherent_pnd(a2, n_max, tail_tol);
}

struct PointResult {
  double q_pb = 0.0;
  double q_b = 0.0;
  std::optional<double> stderr_pb;
};

// Evaluates one sweep point with precomputed exact tables (nullptr for the
// Monte Carlo engine).
PointResult eval_point(const PhotonNumberDistribution& pnd,
                       const MultiplexConfig& mux, const DetectorConfig& det,
                       const ConditionalTables* tables, const SweepEngine& eng,
                       std::uint64_t pseed, bool want_stderr) {
  PointResult r;
  const int n = mux.n_modes();
  if (eng.engine == EngineKind::Exact) {
    const ClickStatistics stats = mix_click_statistics(*tables, pnd);
    r.q_pb = poisson_binomial_q(stats, n);
    r.q_b = binomial_q(stats, n);
    return r;
  }
  RunOptions opts;
  opts.workers = 1;
  opts.keep_raw = want_stderr && eng.resamples > 0;
  const ClickTable table = run_experiment(pnd, mux, det, eng.trials, pseed,
                                          opts);
  const ClickStatistics stats = estimate_statistics(table);
  r.q_pb = poisson_binomial_q(stats, n);
  r.q_b = binomial_q(stats, n);
  if (opts.keep_raw)
    r.stderr_pb = bootstrap_stderr(table, Statistic::PoissonBinomialQ,
                                   eng.resamples, bootstrap_seed(pseed));
  return r;
}

const char* engine_name(const SweepEngine& eng) {
  return eng.engine == EngineKind::Exact ? "exact" : "mc";
}

// Shared "# engine: ..." comment line.  Deliberately omits the worker count
// so files stay byte-identical across --workers settings.
std::string engine_comment(const SweepEngine& eng) {
  std::string s = "# engine: ";
  s += engine_name(eng);
  s += " trials=" + std::to_string(eng.trials);
  s += " seed=" + std::to_string(eng.seed);
  s += " n_max=" + std::to_string(eng.n_max);
  s += " tail_tol=" + fmt17(eng.tail_tol);
  s += " resamples=" + std::to_string(eng.resamples);
  return s;
}

std::string opt_cell(const std::optional<double>& v) {
  return v ? fmt17(*v) : std::string();
}

}  // namespace

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> default_n_th_grid() {
  std::vector<double> g;
  g.reserve(60);
  for (int i = 1; i <= 60; ++i) g.push_back(i * 0.05);
  return g;
}

void run_mean_sweep(const std::string& csv_path, const MeanSweepOptions& opt) {
  const SweepEngine& eng = opt.engine;
  const MultiplexConfig mux = ring_resonator(opt.kappa, opt.n_trc);
  const DetectorConfig det =
      uniform_detector(mux.n_modes(), opt.eta, opt.nu);
  validate_pair(mux, det);

  struct Row {
    StateFamily family;
    double nbar;
  };
  std::vector<Row> rows;
  for (double v : opt.nbar_grid) rows.push_back({StateFamily::Coherent, v});
  for (double v : opt.nbar_grid) rows.push_back({StateFamily::Thermal, v});
  for (int m : opt.fock_grid)
    rows.push_back({StateFamily::Fock, static_cast<double>(m)});
  for (double v : opt.nbar_grid)
    if (v >= 1.0 - 1e-12) rows.push_back({StateFamily::OddCoherent, v});
  if (rows.empty()) throw std::invalid_argument("mean sweep: empty grid");

  ConditionalTables tables;
  if (eng.engine == EngineKind::Exact)
    tables = conditional_tables(mux, det, eng.n_max);

  std::vector<PointResult> results(rows.size());
  run_indexed(eng.workers, static_cast<int>(rows.size()), [&](int i) {
    const Row& row = rows[i];
    PhotonNumberDistribution pnd;
    switch (row.family) {
      case StateFamily::Coherent:
        pnd = coherent_pnd(row.nbar, eng.n_max, eng.tail_tol);
        break;
      case StateFamily::Thermal:
        pnd = thermal_pnd(row.nbar, eng.n_max, eng.tail_tol);
        break;
      case StateFamily::Fock:
        pnd = fock_pnd(static_cast<int>(row.nbar), eng.n_max);
        break;
      default:
        pnd = odd_coherent_for_mean(row.nbar, eng.n_max, eng.tail_tol);
        break;
    }
    results[i] = eval_point(pnd, mux, det, &tables, eng,
                            point_seed(eng.seed, i), /*want_stderr=*/true);
  });

  std::ofstream out = open_out(csv_path);
  out << "# clicksim sweep-mean\n";
  out << "# network: ring kappa=" << fmt17(opt.kappa)
      << " n_trc=" << opt.n_trc << "\n";
  out << "# detector: eta=" << fmt17(opt.eta) << " nu=" << fmt17(opt.nu)
      << "\n";
  out << engine_comment(eng) << "\n";
  out << "family,nbar,q_pb,stderr_pb,q_b\n";
  for (std::size_t i = 0; i < rows.size(); ++i)
    out << family_name(rows[i].family) << ',' << fmt17(rows[i].nbar) << ','
        << fmt17(results[i].q_pb) << ',' << opt_cell(results[i].stderr_pb)
        << ',' << fmt17(results[i].q_b) << "\n";
  out.close();

  std::ofstream gp = open_out(csv_path + ".gnuplot");
  const std::string csv = basename_of(csv_path);
  gp << "# Companion plot script; run with: gnuplot " << basename_of(csv_path)
     << ".gnuplot\n";
  gp << "set datafile separator ','\n";
  gp << "set key outside right\n";
  gp << "set xlabel 'mean photon number'\n";
  gp << "set ylabel 'Q'\n";
  gp << "set xzeroaxis\n";
  gp << "csv = '" << csv << "'\n";
  gp << "plot \\\n";
  const char* families[] = {"coherent", "thermal", "fock", "odd_coherent"};
  for (const char* f : families)
    gp << "  csv skip 1 using 2:(strcol(1) eq '" << f
       << "' ? $3 : 1/0) with linespoints title '" << f << " Q_{PB}', \\\n";
  gp << "  csv skip 1 using 2:(strcol(1) eq 'coherent' ? $5 : 1/0) "
        "with lines dashtype 2 title 'coherent Q_B'\n";
}

void run_detection_sweep(const std::string& csv_path,
                         const DetectionSweepOptions& opt) {
  const SweepEngine& eng = opt.engine;
  if (opt.eta_grid.empty() || opt.n_trc_grid.empty() ||
      (opt.fock_grid.empty() && opt.odd_nbar_grid.empty()))
    throw std::invalid_argument("detection sweep: empty grid");

  struct State {
    StateFamily family;
    double param;
  };
  std::vector<State> states;
  for (int m : opt.fock_grid)
    states.push_back({StateFamily::Fock, static_cast<double>(m)});
  for (double v : opt.odd_nbar_grid)
    states.push_back({StateFamily::OddCoherent, v});

  const int n_eta = static_cast<int>(opt.eta_grid.size());
  const int n_trc = static_cast<int>(opt.n_trc_grid.size());
  const int n_states = static_cast<int>(states.size());
  const int n_cells = n_eta * n_trc;
  const int n_rows = n_states * n_cells;

  // Row index for (state s, eta e, n_trc t); states are the outer blocks.
  auto row_of = [&](int s, int e, int t) { return (s * n_eta + e) * n_trc + t; };

  std::vector<PhotonNumberDistribution> pnds(n_states);
  for (int s = 0; s < n_states; ++s)
    pnds[s] = states[s].family == StateFamily::Fock
                  ? fock_pnd(static_cast<int>(states[s].param), eng.n_max)
                  : odd_coherent_for_mean(states[s].param, eng.n_max,
                                          eng.tail_tol);

  // One task per (eta, n_trc) cell: the conditional tables depend only on
  // the cell, so every state reuses them.
  std::vector<double> q_pb(n_rows, 0.0);
  run_indexed(eng.workers, n_cells, [&](int cell) {
    const int e = cell / n_trc;
    const int t = cell % n_trc;
    const MultiplexConfig mux = ring_resonator(opt.kappa, opt.n_trc_grid[t]);
    const DetectorConfig det =
        uniform_detector(mux.n_modes(), opt.eta_grid[e], opt.nu);
    validate_pair(mux, det);
    ConditionalTables tables;
    if (eng.engine == EngineKind::Exact)
      tables = conditional_tables(mux, det, eng.n_max);
    for (int s = 0; s < n_states; ++s) {
      const int row = row_of(s, e, t);
      q_pb[row] = eval_point(pnds[s], mux, det, &tables, eng,
                             point_seed(eng.seed, row),
                             /*want_stderr=*/false)
                      .q_pb;
    }
  });

  std::ofstream out = open_out(csv_path);
  out << "# clicksim sweep-detection\n";
  out << "# network: ring kappa=" << fmt17(opt.kappa) << "\n";
  out << "# detector: nu=" << fmt17(opt.nu) << "\n";
  out << engine_comment(eng) << "\n";
  out << "family,param,eta,n_trc,q_pb\n";
  for (int s = 0; s < n_states; ++s)
    for (int e = 0; e < n_eta; ++e)
      for (int t = 0; t < n_trc; ++t)
        out << family_name(states[s].family) << ','
            << fmt17(states[s].param) << ',' << fmt17(opt.eta_grid[e]) << ','
            << opt.n_trc_grid[t] << ',' << fmt17(q_pb[row_of(s, e, t)])
            << "\n";
  out.close();

  std::ofstream gp = open_out(csv_path + ".gnuplot");
  const std::string csv = basename_of(csv_path);
  const int cols = std::min(3, n_states);
  const int rows_l = (n_states + cols - 1) / cols;
  gp << "# Companion plot script; one panel per state, Q_PB vs N_trc.\n";
  gp << "set datafile separator ','\n";
  gp << "set xlabel 'N_{trc}'\n";
  gp << "set ylabel 'Q_{PB}'\n";
  gp << "set xzeroaxis\n";
  gp << "csv = '" << csv << "'\n";
  gp << "set multiplot layout " << rows_l << "," << cols << "\n";
  for (int s = 0; s < n_states; ++s) {
    gp << "set title '" << family_name(states[s].family) << " "
       << fmt17(states[s].param) << "'\n";
    gp << "plot \\\n";
    for (int e = 0; e < n_eta; ++e) {
      gp << "  csv skip 1 using 4:(strcol(1) eq '"
         << family_name(states[s].family) << "' && abs($2-("
         << fmt17(states[s].param) << "))<1e-12 && abs($3-("
         << fmt17(opt.eta_grid[e]) << "))<1e-12 ? $5 : 1/0) "
         << "with linespoints title 'eta=" << fmt17(opt.eta_grid[e]) << "'";
      gp << (e + 1 < n_eta ? ", \\\n" : "\n");
    }
  }
  gp << "unset multiplot\n";
}

void run_spats_sweep(const std::string& csv_path,
                     const SpatsSweepOptions& opt) {
  const SweepEngine& eng = opt.engine;
  const std::vector<double> n_th_grid =
      opt.n_th_grid.empty() ? default_n_th_grid() : opt.n_th_grid;
  if (opt.eta_grid.empty() || opt.n_trc_grid.empty())
    throw std::invalid_argument("spats sweep: empty grid");

  const int n_eta = static_cast<int>(opt.eta_grid.size());
  const int n_trc = static_cast<int>(opt.n_trc_grid.size());
  const int n_th = static_cast<int>(n_th_grid.size());
  const int n_cells = n_eta * n_trc;
  const int n_rows = n_cells * n_th;

  auto row_of = [&](int e, int t, int h) { return (e * n_trc + t) * n_th + h; };

  std::vector<PhotonNumberDistribution> pnds(n_th);
  for (int h = 0; h < n_th; ++h)
    pnds[h] = spats_pnd(n_th_grid[h], eng.n_max, eng.tail_tol);

  std::vector<double> q_pb(n_rows, 0.0);
  run_indexed(eng.workers, n_cells, [&](int cell) {
    const int e = cell / n_trc;
    const int t = cell % n_trc;
    const MultiplexConfig mux = ring_resonator(opt.kappa, opt.n_trc_grid[t]);
    const DetectorConfig det =
        uniform_detector(mux.n_modes(), opt.eta_grid[e], opt.nu);
    validate_pair(mux, det);
    ConditionalTables tables;
    if (eng.engine == EngineKind::Exact)
      tables = conditional_tables(mux, det, eng.n_max);
    for (int h = 0; h < n_th; ++h) {
      const int row = row_of(e, t, h);
      q_pb[row] = eval_point(pnds[h], mux, det, &tables, eng,
                             point_seed(eng.seed, row),
                             /*want_stderr=*/false)
                      .q_pb;
    }
  });

  std::ofstream out = open_out(csv_path);
  out << "# clicksim sweep-spats\n";
  out << "# network: ring kappa=" << fmt17(opt.kappa) << "\n";
  out << "# detector: nu=" << fmt17(opt.nu) << "\n";
  out << engine_comment(eng) << "\n";
  out << "n_th,eta,n_trc,q_pb,q_m_closed,q_b_closed\n";
  for (int e = 0; e < n_eta; ++e)
    for (int t = 0; t < n_trc; ++t)
      for (int h = 0; h < n_th; ++h)
        out << fmt17(n_th_grid[h]) << ',' << fmt17(opt.eta_grid[e]) << ','
            << opt.n_trc_grid[t] << ',' << fmt17(q_pb[row_of(e, t, h)]) << ','
            << fmt17(spats_qm_closed(n_th_grid[h], opt.eta_grid[e])) << ','
            << fmt17(spats_qb_closed(n_th_grid[h], opt.eta_grid[e],
                                     opt.n_trc_grid[t]))
            << "\n";
  out.close();

  std::ofstream gp = open_out(csv_path + ".gnuplot");
  const std::string csv = basename_of(csv_path);
  gp << "# Companion plot script; one panel per eta, curves over N_trc.\n";
  gp << "set datafile separator ','\n";
  gp << "set xlabel 'thermal occupation'\n";
  gp << "set ylabel 'Q'\n";
  gp << "set xzeroaxis\n";
  gp << "csv = '" << csv << "'\n";
  gp << "set multiplot layout 1," << n_eta << "\n";
  for (int e = 0; e < n_eta; ++e) {
    gp << "set title 'eta=" << fmt17(opt.eta_grid[e]) << "'\n";
    gp << "plot \\\n";
    for (int t = 0; t < n_trc; ++t)
      gp << "  csv skip 1 using 1:(abs($2-(" << fmt17(opt.eta_grid[e])
         << "))<1e-12 && $3==" << opt.n_trc_grid[t]
         << " ? $4 : 1/0) with lines title 'Q_{PB} N_{trc}="
         << opt.n_trc_grid[t] << "', \\\n";
    gp << "  csv skip 1 using 1:(abs($2-(" << fmt17(opt.eta_grid[e])
       << "))<1e-12 && $3==" << opt.n_trc_grid[0]
       << " ? $5 : 1/0) with lines dashtype 2 title 'Q_M', \\\n";
    gp << "  csv skip 1 using 1:(abs($2-(" << fmt17(opt.eta_grid[e])
       << "))<1e-12 && $3==" << opt.n_trc_grid[n_trc - 1]
       << " ? $6 : 1/0) with lines dashtype 3 title 'Q_B N_{trc}="
       << opt.n_trc_grid[n_trc - 1] << "'\n";
  }
  gp << "unset multiplot\n";
}

void write_click_table_csv(const std::string& csv_path, const ClickTable& t) {
  if (t.raw.size() != t.n_trials)
    throw std::invalid_argument(
        "click table was produced without keep_raw; no per-trial rows");
  std::ofstream out = open_out(csv_path);
  for (int j = 1; j <= t.n_modes; ++j) out << (j > 1 ? "," : "") << 'd' << j;
  out << "\n";
  for (std::uint64_t i = 0; i < t.n_trials; ++i) {
    const std::uint64_t mask = t.raw[i];
    for (int j = 0; j < t.n_modes; ++j)
      out << (j > 0 ? "," : "") << ((mask >> j) & 1u);
    out << "\n";
  }
  for (int k = 0; k <= t.n_modes; ++k)
    out << "#f," << k << ',' << t.f[k] << "\n";
  for (int j = 0; j < t.n_modes; ++j)
    out << "#w," << j + 1 << ',' << t.w[j] << "\n";
  out << "#seed," << t.seed << "\n";
  out << "#sampled_tail_mass," << fmt17(t.sampled_tail_mass) << "\n";
}

void write_analysis_csv(const std::string& csv_path,
                        const ClickStatistics& stats, const QReport& report) {
  std::ofstream out = open_out(csv_path);
  out << "quantity,index,value\n";
  for (std::size_t k = 0; k < stats.c.size(); ++k)
    out << "c," << k << ',' << fmt17(stats.c[k]) << "\n";
  for (std::size_t j = 0; j < stats.p.size(); ++j)
    out << "p," << j + 1 << ',' << fmt17(stats.p[j]) << "\n";
  out << "mean_c,," << fmt17(stats.mean_c) << "\n";
  out << "var_c,," << fmt17(stats.var_c) << "\n";
  out << "m,," << fmt17(stats.m) << "\n";
  out << "sigma_sq,," << fmt17(stats.sigma_sq) << "\n";
  if (report.q_m) out << "q_m,," << fmt17(*report.q_m) << "\n";
  out << "q_b,," << fmt17(report.q_b) << "\n";
  out << "q_pb,," << fmt17(report.q_pb) << "\n";
  if (report.stderr_pb) out << "stderr_pb,," << fmt17(*report.stderr_pb) << "\n";
  out << "n_modes,," << report.n_modes << "\n";
  out << "provenance,,"
      << (report.provenance == Provenance::Exact ? "exact" : "mc") << "\n";
}

}  // namespace clicksim
