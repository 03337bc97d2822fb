#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clicksim/config.hpp"
#include "clicksim/montecarlo.hpp"
#include "clicksim/stats.hpp"

namespace clicksim {

// Engine/source parameters shared by all sweep commands.  Sweeps default to
// a loose tail tolerance: at n_max = 30 the heavier-tailed sources on the
// default grids truncate a few 1e-3 of mass, which is recorded per point
// rather than refused.
struct SweepEngine {
  EngineKind engine = EngineKind::Exact;
  std::uint64_t trials = 1000000;
  std::uint64_t seed = 1;
  int workers = 1;
  int n_max = kDefaultNMax;
  double tail_tol = 1e-2;
  int resamples = 100;  // bootstrap resamples for MC stderr; 0 disables
};

// Q_PB (and Q_B) versus mean photon number for the four source families
// through one fixed ring network.
struct MeanSweepOptions {
  double kappa = 0.6;
  double eta = 1.0;
  double nu = 0.0;
  int n_trc = 10;
  std::vector<double> nbar_grid = {0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5};
  std::vector<int> fock_grid = {1, 2, 3, 4, 5};
  SweepEngine engine;
};

// Q_PB over an (eta, n_trc) grid for the quantum test states.
struct DetectionSweepOptions {
  double kappa = 0.6;
  double nu = 0.0;
  std::vector<double> eta_grid = {0.1, 0.2, 0.3, 0.4, 0.5,
                                  0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<int> n_trc_grid = {1,  2,  3,  4,  5,  6,  7,  8,  9,  10,
                                 11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
  std::vector<int> fock_grid = {1, 2, 3};
  std::vector<double> odd_nbar_grid = {1, 2, 3};
  SweepEngine engine;
};

// Q_PB for the single-photon-added thermal state over n_th, next to the
// closed-form Q_M and Q_B columns.
struct SpatsSweepOptions {
  double kappa = 0.6;
  double nu = 0.0;
  std::vector<double> n_th_grid;  // default 0.05..3.0 step 0.05
  std::vector<double> eta_grid = {0.5, 1.0};
  std::vector<int> n_trc_grid = {2, 4, 6, 8, 10};
  SweepEngine engine;
};

std::vector<double> default_n_th_grid();

// Each writer emits the CSV plus a gnuplot companion at "<csv_path>.gnuplot".
// Output is byte-identical for a fixed seed regardless of engine.workers.
void run_mean_sweep(const std::string& csv_path, const MeanSweepOptions& opt);
void run_detection_sweep(const std::string& csv_path,
                         const DetectionSweepOptions& opt);
void run_spats_sweep(const std::string& csv_path, const SpatsSweepOptions& opt);

// Raw click table: one row of N 0/1 cells per trial, then footer lines with
// the f_k and w_j counts.
void write_click_table_csv(const std::string& csv_path, const ClickTable& t);

// Single-experiment report in long form (quantity,index,value).
void write_analysis_csv(const std::string& csv_path,
                        const ClickStatistics& stats, const QReport& report);

// 17 significant digits, enough to round-trip a double exactly.
std::string fmt17(double v);

}  // namespace clicksim
