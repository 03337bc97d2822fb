#pragma once

#include <cstdint>

#include "clicksim/click_statistics.hpp"
#include "clicksim/network.hpp"
#include "clicksim/rng.hpp"
#include "clicksim/sources.hpp"

namespace clicksim {

// Raw counts from a Monte Carlo run: f[k] trials with exactly k clicks,
// w[j] trials in which mode j clicked.  sum_j w_j == sum_k k f_k always.
// raw holds one click mask per trial when retained (bit j = mode j clicked).
struct ClickTable {
  int n_modes = 0;
  std::uint64_t n_trials = 0;
  std::vector<std::uint64_t> f;  // size N+1
  std::vector<std::uint64_t> w;  // size N
  std::uint64_t seed = 0;
  double sampled_tail_mass = 0.0;  // source mass renormalized away
  std::vector<std::uint64_t> raw;  // empty unless keep_raw
};

struct RunOptions {
  bool keep_raw = false;
  int workers = 1;
};

enum class Statistic { PoissonBinomialQ, BinomialQ, MeanClicks };

// One trial: routes n photons through the click weights (one uniform draw
// per photon, cumulative walk over q_j), then ORs in a dark-count draw for
// every mode with nu_j > 0, in mode order.  Returns the click mask.
std::uint64_t simulate_trial(SplitMix64& rng, int n_photons,
                             const ClickWeights& cw,
                             const DetectorConfig& det);

// n_trials independent trials; trial t draws from SplitMix64::for_stream
// (seed, t), with the photon number sampled first from the renormalized
// truncated source.  Bitwise deterministic for fixed seed regardless of
// opts.workers.  Requires n_modes <= 64.
ClickTable run_experiment(const PhotonNumberDistribution& pnd,
                          const MultiplexConfig& mux,
                          const DetectorConfig& det, std::uint64_t n_trials,
                          std::uint64_t seed, RunOptions opts = {});

// c_k = f_k / M, p_j = w_j / M plus the usual summaries.
ClickStatistics estimate_statistics(const ClickTable& table);

// Standard error of a statistic by multinomial resampling of trials.
// PoissonBinomialQ needs the per-trial raw masks (p_j enters through
// sigma^2); the f-only statistics work from the click histogram alone.
// Returns the population spread over `resamples` re-estimates.
double bootstrap_stderr(const ClickTable& table, Statistic stat,
                        int resamples, std::uint64_t seed);

}  // namespace clicksim
