// End-to-end acceptance checks for the click-statistics toolkit.  Each
// criterion prints exactly one [PASS]/[FAIL] line; the exit code is the
// number of failed criteria.  All tolerances are pinned here, and every
// Monte Carlo run uses a fixed seed so the outcome is reproducible.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "clicksim/exact.hpp"
#include "clicksim/montecarlo.hpp"
#include "clicksim/network.hpp"
#include "clicksim/rng.hpp"
#include "clicksim/sources.hpp"
#include "clicksim/stats.hpp"
#include "clicksim/sweeps.hpp"

using namespace clicksim;

namespace {

constexpr std::uint64_t kTrials = 1000000;
constexpr double kKappa = 0.6;
constexpr int kNTrc = 10;

int g_failures = 0;

void report(int idx, bool ok, const std::string& detail) {
  std::printf("[%s] %2d: %s\n", ok ? "PASS" : "FAIL", idx, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Per-point seeds, derived the same way the sweep commands derive them.
std::uint64_t stream_seed(std::uint64_t root, int row) {
  return SplitMix64::for_stream(root, 0x706f696e74ull + row).next_u64();
}

PhotonNumberDistribution make_state(StateFamily fam, double param, int n_max,
                                    double tail_tol) {
  switch (fam) {
    case StateFamily::Coherent:
      return coherent_pnd(param, n_max, tail_tol);
    case StateFamily::Thermal:
      return thermal_pnd(param, n_max, tail_tol);
    case StateFamily::Fock:
      return fock_pnd(static_cast<int>(std::llround(param)), n_max);
    case StateFamily::OddCoherent: {
      const double a =
          param <= 1.0 + 1e-12 ? 1e-8 : solve_odd_coherent_alpha(param);
      return odd_coherent_pnd(a, n_max, tail_tol);
    }
    default:
      return spats_pnd(param, n_max, tail_tol);
  }
}

// The mean-photon-number grid shared by several criteria: all four source
// families across one kappa=0.6, N_trc=10 ring, eta=1 detectors.
struct GridData {
  std::vector<StateFamily> family;
  std::vector<double> param;
  std::vector<ClickStatistics> exact1;   // eta = 1
  std::vector<ClickTable> mc1;           // eta = 1, M = 1e6
  std::vector<ClickStatistics> exact05;  // coherent rows only, eta = 0.5
  std::vector<ClickTable> mc05;
  std::size_t coherent_rows = 0;
};

std::vector<double> half_step_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 10; ++i) g.push_back(0.5 * i);
  return g;
}

GridData build_grid_data() {
  GridData d;
  const std::vector<double> nbar = half_step_grid();
  for (double v : nbar) {
    d.family.push_back(StateFamily::Coherent);
    d.param.push_back(v);
  }
  d.coherent_rows = d.family.size();
  for (double v : nbar) {
    d.family.push_back(StateFamily::Thermal);
    d.param.push_back(v);
  }
  for (int m = 1; m <= 5; ++m) {
    d.family.push_back(StateFamily::Fock);
    d.param.push_back(m);
  }
  for (double v : nbar)
    if (v >= 1.0 - 1e-12) {
      d.family.push_back(StateFamily::OddCoherent);
      d.param.push_back(v);
    }

  // Deep truncation: a hard-truncated thermal distribution is itself weakly
  // nonclassical (bounded support), and that artifact scales with the tail
  // mass.  n_max = 140 keeps it at the 1e-11 level even for nbar = 5.
  const int n_max = 140;
  const MultiplexConfig mux = ring_resonator(kKappa, kNTrc);
  const DetectorConfig det1 = uniform_detector(kNTrc, 1.0);
  const DetectorConfig det05 = uniform_detector(kNTrc, 0.5);
  const ConditionalTables t1 = conditional_tables(mux, det1, n_max);
  const ConditionalTables t05 = conditional_tables(mux, det05, n_max);

  for (std::size_t i = 0; i < d.family.size(); ++i) {
    const PhotonNumberDistribution pnd =
        make_state(d.family[i], d.param[i], n_max, 1e-8);
    d.exact1.push_back(mix_click_statistics(t1, pnd));
    d.mc1.push_back(run_experiment(pnd, mux, det1, kTrials,
                                   stream_seed(1, static_cast<int>(i)), {}));
    if (d.family[i] == StateFamily::Coherent) {
      d.exact05.push_back(mix_click_statistics(t05, pnd));
      d.mc05.push_back(run_experiment(pnd, mux, det05, kTrials,
                                      stream_seed(2, static_cast<int>(i)),
                                      {}));
    }
  }
  return d;
}

// --- criterion 1 ---------------------------------------------------------

void criterion_coherent_is_neutral(const GridData& d) {
  double worst_exact = 0.0, worst_mc = 0.0;
  for (std::size_t i = 0; i < d.coherent_rows; ++i) {
    worst_exact = std::max(worst_exact,
                           std::fabs(poisson_binomial_q(d.exact1[i], kNTrc)));
    worst_exact = std::max(worst_exact,
                           std::fabs(poisson_binomial_q(d.exact05[i], kNTrc)));
    worst_mc = std::max(
        worst_mc,
        std::fabs(poisson_binomial_q(estimate_statistics(d.mc1[i]), kNTrc)));
    worst_mc = std::max(
        worst_mc,
        std::fabs(poisson_binomial_q(estimate_statistics(d.mc05[i]), kNTrc)));
  }
  report(1, worst_exact <= 1e-9 && worst_mc <= 1e-2,
         "coherent input stays neutral: worst exact |Q_PB| = " +
             num(worst_exact) + " (<= 1e-9), worst sampled |Q_PB| = " +
             num(worst_mc) + " (<= 0.01)");
}

// --- criterion 2 ---------------------------------------------------------

void criterion_balanced_reduction() {
  const int n_modes = 10;
  const int n_max = 60;
  const MultiplexConfig mux = uniform_splitter(n_modes);
  double worst = 0.0;
  for (double eta : {0.8, 1.0}) {
    const ConditionalTables tables =
        conditional_tables(mux, uniform_detector(n_modes, eta), n_max);
    const std::vector<std::pair<StateFamily, double>> states = {
        {StateFamily::Coherent, 1.0}, {StateFamily::Coherent, 3.0},
        {StateFamily::Thermal, 1.0},  {StateFamily::Thermal, 3.0},
        {StateFamily::Fock, 1.0},     {StateFamily::Fock, 3.0},
        {StateFamily::OddCoherent, 1.5}, {StateFamily::OddCoherent, 3.0},
        {StateFamily::Spats, 0.5},    {StateFamily::Spats, 1.5}};
    for (const auto& [fam, param] : states) {
      const ClickStatistics stats =
          mix_click_statistics(tables, make_state(fam, param, n_max, 1e-6));
      worst = std::max(worst, std::fabs(poisson_binomial_q(stats, n_modes) -
                                        binomial_q(stats, n_modes)));
    }
  }

  // With more balanced modes the click witness approaches the photon-number
  // witness, which is exactly 1 for thermal light.
  auto thermal_gap = [](int n) {
    const MultiplexConfig mux_n = uniform_splitter(n);
    const ClickStatistics stats = exact_click_statistics(
        thermal_pnd(1.0, 60), mux_n, uniform_detector(n, 1.0));
    return std::fabs(poisson_binomial_q(stats, n) - 1.0);
  };
  const double gap64 = thermal_gap(64);
  const double gap8 = thermal_gap(8);
  report(2, worst <= 1e-12 && gap64 < gap8,
         "balanced splitters: worst |Q_PB - Q_B| = " + num(worst) +
             " (<= 1e-12); thermal |Q_PB - 1| shrinks from " + num(gap8) +
             " at N=8 to " + num(gap64) + " at N=64");
}

// --- criterion 3 ---------------------------------------------------------

void criterion_classical_states_stay_nonnegative(const GridData& d) {
  double min_q = 1e300;
  // mean-photon-number grid, eta = 1
  for (std::size_t i = 0; i < d.family.size(); ++i)
    if (d.family[i] == StateFamily::Coherent ||
        d.family[i] == StateFamily::Thermal)
      min_q = std::min(min_q, poisson_binomial_q(d.exact1[i], kNTrc));

  // (eta, N_trc) grid at means 1, 2, 3.  Deep truncation again: with a
  // shorter table the residual tail shows up as a spurious negativity at
  // the 1e-4 level.
  std::vector<PhotonNumberDistribution> pnds;
  for (double nbar : {1.0, 2.0, 3.0}) {
    pnds.push_back(coherent_pnd(nbar, 100, 1e-6));
    pnds.push_back(thermal_pnd(nbar, 100, 1e-6));
  }
  for (int e = 1; e <= 10; ++e) {
    const double eta = 0.1 * e;
    for (int n_trc = 1; n_trc <= 20; ++n_trc) {
      const MultiplexConfig mux = ring_resonator(kKappa, n_trc);
      const ConditionalTables tables =
          conditional_tables(mux, uniform_detector(n_trc, eta), 100);
      for (const auto& pnd : pnds)
        min_q = std::min(
            min_q,
            poisson_binomial_q(mix_click_statistics(tables, pnd), n_trc));
    }
  }
  report(3, min_q >= -1e-9,
         "coherent and thermal inputs never drop below zero: min Q_PB = " +
             num(min_q) + " (>= -1e-9) over the mean and efficiency grids");
}

// --- criterion 4 ---------------------------------------------------------

void criterion_sign_structure(const GridData& d) {
  double thermal_min = 1e300, nonclassical_max = -1e300,
         coherent_qb_max = -1e300;
  for (std::size_t i = 0; i < d.family.size(); ++i) {
    const ClickStatistics stats = estimate_statistics(d.mc1[i]);
    switch (d.family[i]) {
      case StateFamily::Thermal:
        thermal_min = std::min(thermal_min, poisson_binomial_q(stats, kNTrc));
        break;
      case StateFamily::Fock:
      case StateFamily::OddCoherent:
        nonclassical_max =
            std::max(nonclassical_max, poisson_binomial_q(stats, kNTrc));
        break;
      case StateFamily::Coherent:
        coherent_qb_max = std::max(coherent_qb_max, binomial_q(stats, kNTrc));
        break;
      default:
        break;
    }
  }
  report(4,
         thermal_min > 0 && nonclassical_max < 0 && coherent_qb_max < 0,
         "sampled sign structure: thermal min Q_PB = " + num(thermal_min) +
             " (> 0), Fock/odd-coherent max Q_PB = " + num(nonclassical_max) +
             " (< 0), coherent max Q_B = " + num(coherent_qb_max) + " (< 0)");
}

// --- criterion 5 ---------------------------------------------------------

void criterion_single_mode_identity() {
  // The identity holds exactly for a normalized source; the truncated tail
  // perturbs it by tail_mass * c_1 / (1 - c_1), so push the tail below the
  // tolerance (thermal nbar=2 at n_max=100 leaves ~2e-18).
  const MultiplexConfig mux = ring_resonator(kKappa, 1);
  const DetectorConfig det = uniform_detector(1, 1.0);
  const ConditionalTables tables = conditional_tables(mux, det, 100);
  const std::vector<std::pair<StateFamily, double>> states = {
      {StateFamily::Coherent, 2.0},
      {StateFamily::Thermal, 2.0},
      {StateFamily::Fock, 2.0},
      {StateFamily::OddCoherent, 2.0},
      {StateFamily::Spats, 1.0}};
  double worst_exact = 0.0, worst_mc = 0.0;
  int row = 0;
  for (const auto& [fam, param] : states) {
    const PhotonNumberDistribution pnd = make_state(fam, param, 100, 1e-6);
    worst_exact = std::max(
        worst_exact,
        std::fabs(poisson_binomial_q(mix_click_statistics(tables, pnd), 1)));
    const ClickTable table =
        run_experiment(pnd, mux, det, kTrials, stream_seed(3, row++), {});
    worst_mc = std::max(
        worst_mc,
        std::fabs(poisson_binomial_q(estimate_statistics(table), 1)));
  }
  report(5, worst_exact <= 1e-12 && worst_mc <= 1e-6,
         "single measured pulse: worst exact |Q_PB| = " + num(worst_exact) +
             " (<= 1e-12), worst sampled |Q_PB| = " + num(worst_mc) +
             " (<= 1e-6) for all five families");
}

// --- criterion 6 ---------------------------------------------------------

void criterion_two_computation_paths_agree() {
  const std::vector<std::pair<StateFamily, double>> states = {
      {StateFamily::Coherent, 2.0},
      {StateFamily::Thermal, 1.5},
      {StateFamily::Fock, 3.0},
      {StateFamily::OddCoherent, 1.9},
      {StateFamily::Spats, 1.0}};
  struct Setup {
    MultiplexConfig mux;
    DetectorConfig det;
  };
  const std::vector<Setup> setups = {
      {ring_resonator(kKappa, 8), uniform_detector(8, 1.0)},
      {ring_resonator(kKappa, 8), uniform_detector(8, 0.55, 0.01)},
      {uniform_splitter(6), uniform_detector(6, 0.7)},
      {custom_config({0.5, 0.3, 0.15}, 0.05),
       make_detector({0.9, 0.7, 0.5}, {0.0, 0.01, 0.02})}};
  double worst = 0.0;
  for (const auto& setup : setups)
    for (const auto& [fam, param] : states) {
      const PhotonNumberDistribution pnd = make_state(fam, param, 60, 1e-6);
      const double moment_form = poisson_binomial_q(
          exact_click_statistics(pnd, setup.mux, setup.det),
          setup.mux.n_modes());
      const double covariance_form =
          qpb_operator_form(pnd, setup.mux, setup.det);
      worst = std::max(worst, std::fabs(moment_form - covariance_form));
    }
  report(6, worst <= 1e-9,
         "moment-based and covariance-based Q_PB agree: worst gap = " +
             num(worst) + " (<= 1e-9) over 20 state/network pairs");
}

// --- criterion 7 ---------------------------------------------------------

void criterion_enumeration_oracle() {
  std::vector<MultiplexConfig> muxes;
  for (int n = 1; n <= 4; ++n) muxes.push_back(uniform_splitter(n));
  for (int n = 1; n <= 4; ++n) muxes.push_back(ring_resonator(kKappa, n));
  muxes.push_back(custom_config({0.5, 0.3, 0.15}, 0.05));

  double worst = 0.0;
  for (const auto& mux : muxes)
    for (double eta : {0.3, 0.7, 1.0})
      for (double nu : {0.0, 0.05}) {
        const DetectorConfig det =
            uniform_detector(mux.n_modes(), eta, nu);
        const ConditionalTables tables = conditional_tables(mux, det, 6);
        for (int n = 0; n <= 6; ++n) {
          const ConditionalColumn col = brute_force_tables(mux, det, n);
          for (int k = 0; k <= mux.n_modes(); ++k)
            worst = std::max(worst, std::fabs(tables.c(k, n) - col.c[k]));
          for (int j = 0; j < mux.n_modes(); ++j)
            worst = std::max(worst, std::fabs(tables.p(j, n) - col.p[j]));
        }
      }
  report(7, worst <= 1e-12,
         "subset-sum tables match exhaustive enumeration: worst deviation = " +
             num(worst) + " (<= 1e-12) for N <= 4, n <= 6");
}

// --- criterion 8 ---------------------------------------------------------

void criterion_mc_convergence(const GridData& d) {
  double worst_tv = 0.0;
  bool counting_ok = true;
  auto check_table = [&counting_ok](const ClickTable& t) {
    std::uint64_t by_mode = 0, by_count = 0;
    for (std::uint64_t w : t.w) by_mode += w;
    for (std::size_t k = 0; k < t.f.size(); ++k) by_count += k * t.f[k];
    if (by_mode != by_count) counting_ok = false;
  };
  for (std::size_t i = 0; i < d.family.size(); ++i) {
    const ClickStatistics mc = estimate_statistics(d.mc1[i]);
    double tv = 0.0;
    for (std::size_t k = 0; k < mc.c.size(); ++k)
      tv += std::fabs(mc.c[k] - d.exact1[i].c[k]);
    worst_tv = std::max(worst_tv, 0.5 * tv);
    check_table(d.mc1[i]);
  }
  for (const ClickTable& t : d.mc05) check_table(t);
  report(8, worst_tv <= 0.005 && counting_ok,
         "sampled click distributions converge: worst total variation = " +
             num(worst_tv) +
             " (<= 0.005); per-mode and per-count click totals agree on "
             "every table");
}

// --- criterion 9 ---------------------------------------------------------

void criterion_photon_added_thermal_closed_forms() {
  const double root = 1.0 / std::sqrt(2.0);
  const double at_root =
      std::max(std::fabs(spats_qm_closed(root, 1.0)),
               std::fabs(spats_qm_closed(root, 0.37)));
  const bool bracket = spats_qm_closed(root - 1e-6, 1.0) < 0.0 &&
                       spats_qm_closed(root + 1e-6, 1.0) > 0.0;

  // Closed-form Q_B against the analytic engine on a balanced splitter.
  const int n_modes = 8;
  const double eta = 0.7;
  const MultiplexConfig mux = uniform_splitter(n_modes);
  const ConditionalTables tables =
      conditional_tables(mux, uniform_detector(n_modes, eta), 100);
  double worst_qb = 0.0;
  for (int i = 1; i <= 12; ++i) {
    const double n_th = 0.25 * i;
    const ClickStatistics stats =
        mix_click_statistics(tables, spats_pnd(n_th, 100, 1e-6));
    worst_qb = std::max(worst_qb, std::fabs(binomial_q(stats, n_modes) -
                                            spats_qb_closed(n_th, eta,
                                                            n_modes)));
  }

  // Window where only the Poisson-binomial witness flags nonclassicality.
  const MultiplexConfig ring = ring_resonator(kKappa, 8);
  const ConditionalTables ring_tables =
      conditional_tables(ring, uniform_detector(8, 0.5), 60);
  int window = 0;
  for (double n_th : default_n_th_grid()) {
    const double q_pb = poisson_binomial_q(
        mix_click_statistics(ring_tables, spats_pnd(n_th, 60, 1e-2)), 8);
    if (q_pb < 0 && spats_qm_closed(n_th, 0.5) > 0 &&
        spats_qb_closed(n_th, 0.5, 8) > 0)
      ++window;
  }
  report(9,
         at_root <= 1e-12 && bracket && worst_qb <= 1e-9 && window > 0,
         "photon-added thermal closed forms: |Q_M| at the 1/sqrt(2) root = " +
             num(at_root) + ", worst closed-vs-exact Q_B gap = " +
             num(worst_qb) + " (<= 1e-9), and " + std::to_string(window) +
             " grid points where only Q_PB is negative");
}

// --- criterion 10 --------------------------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CLICKSIM_BIN) + " " + args +
                          " > acc_cli_out.tmp 2> acc_cli_err.tmp";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_byte_determinism() {
  {
    std::ofstream cfg("acc_tab.cfg");
    cfg << "[source]\nfamily = thermal\nmean = 1.3\n"
        << "[network]\nscheme = ring\nkappa = 0.6\nn_trc = 6\n"
        << "[detector]\neta = 0.85\nnu = 0.001\n"
        << "[engine]\ntype = mc\ntrials = 20000\nseed = 11\n";
  }
  struct Job {
    std::string name;
    std::string args;  // without --out / --workers
  };
  const std::vector<Job> jobs = {
      {"table", "table --config acc_tab.cfg"},
      {"sweep-mean",
       "sweep-mean --nbar 0.5,1.5 --fock 1,2 --ntrc 5 --engine mc "
       "--trials 20000 --seed 3 --resamples 50"},
      {"sweep-detection",
       "sweep-detection --eta-grid 0.4,0.9 --ntrc-grid 2,4 --fock 1 "
       "--odd-nbar 1.5 --engine mc --trials 20000 --seed 5"},
      {"sweep-spats",
       "sweep-spats --nth-grid 0.6,0.9 --eta-grid 0.5 --ntrc-grid 6 "
       "--engine exact"}};
  bool all_ok = true;
  std::string bad;
  for (const Job& job : jobs) {
    const std::string base = "acc_" + job.name;
    const bool ok =
        run_cli(job.args + " --out " + base + "_1.csv") == 0 &&
        run_cli(job.args + " --out " + base + "_2.csv") == 0 &&
        run_cli(job.args + " --out " + base + "_3.csv --workers 8") == 0;
    const std::string a = slurp(base + "_1.csv");
    if (!ok || a.empty() || a != slurp(base + "_2.csv") ||
        a != slurp(base + "_3.csv")) {
      all_ok = false;
      bad += (bad.empty() ? "" : ", ") + job.name;
    }
    for (const char* suffix : {"_1.csv", "_2.csv", "_3.csv"}) {
      std::remove((base + suffix).c_str());
      std::remove((base + suffix + ".gnuplot").c_str());
    }
  }
  std::remove("acc_tab.cfg");
  std::remove("acc_cli_out.tmp");
  std::remove("acc_cli_err.tmp");
  report(10, all_ok,
         all_ok ? "table and all sweep outputs are byte-identical across "
                  "reruns and worker counts {1, 8}"
                : "determinism broken for: " + bad);
}

}  // namespace

int main() {
  try {
    const GridData grid = build_grid_data();

    struct Step {
      int idx;
      std::function<void()> fn;
    };
    const std::vector<Step> steps = {
        {1, [&] { criterion_coherent_is_neutral(grid); }},
        {2, [] { criterion_balanced_reduction(); }},
        {3, [&] { criterion_classical_states_stay_nonnegative(grid); }},
        {4, [&] { criterion_sign_structure(grid); }},
        {5, [] { criterion_single_mode_identity(); }},
        {6, [] { criterion_two_computation_paths_agree(); }},
        {7, [] { criterion_enumeration_oracle(); }},
        {8, [&] { criterion_mc_convergence(grid); }},
        {9, [] { criterion_photon_added_thermal_closed_forms(); }},
        {10, [] { criterion_byte_determinism(); }}};
    for (const Step& step : steps) {
      try {
        step.fn();
      } catch (const std::exception& e) {
        report(step.idx, false, std::string("unexpected error: ") + e.what());
      }
    }
  } catch (const std::exception& e) {
    std::printf("[FAIL] setup: %s\n", e.what());
    return 10;
  }
  return g_failures;
}
