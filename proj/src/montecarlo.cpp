#include "clicksim/montecarlo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <span>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "clicksim/errors.hpp"
#include "clicksim/stats.hpp"

namespace clicksim {

namespace {

// Draw protocol per trial, in this fixed order: one uniform for the photon
// number, one per photon for placement, one per mode with nu > 0 for the
// dark count.  Changing this order would silently break seed compatibility.
std::uint64_t trial_mask(SplitMix64& rng, int n_photons,
                         std::span<const double> q,
                         std::span<const double> dark_p) {
  std::uint64_t mask = 0;
  for (int i = 0; i < n_photons; ++i) {
    double u = rng.next_double();
    for (std::size_t j = 0; j < q.size(); ++j) {
      u -= q[j];
      if (u < 0.0) {
        mask |= std::uint64_t{1} << j;
        break;
      }
    }
    // falling through means the photon was lost
  }
  for (std::size_t j = 0; j < dark_p.size(); ++j)
    if (dark_p[j] > 0.0 && rng.next_double() < dark_p[j])
      mask |= std::uint64_t{1} << j;
  return mask;
}

std::vector<double> dark_probs(const DetectorConfig& det) {
  std::vector<double> dark(det.nu.size());
  for (std::size_t j = 0; j < dark.size(); ++j)
    dark[j] = -std::expm1(-det.nu[j]);
  return dark;
}

ClickStatistics summarize(const std::vector<std::uint64_t>& f,
                          const std::vector<std::uint64_t>& w,
                          std::uint64_t trials) {
  std::vector<double> c(f.size()), p(w.size());
  for (std::size_t k = 0; k < f.size(); ++k)
    c[k] = static_cast<double>(f[k]) / trials;
  for (std::size_t j = 0; j < w.size(); ++j)
    p[j] = static_cast<double>(w[j]) / trials;
  return click_summary(std::move(c), std::move(p));
}

double evaluate(Statistic stat, const std::vector<std::uint64_t>& f,
                const std::vector<std::uint64_t>& w, std::uint64_t trials,
                int n_modes) {
  const ClickStatistics s = summarize(f, w, trials);
  switch (stat) {
    case Statistic::PoissonBinomialQ:
      return poisson_binomial_q(s, n_modes);
    case Statistic::BinomialQ:
      return binomial_q(s, n_modes);
    case Statistic::MeanClicks:
      return s.mean_c;
  }
  throw std::invalid_argument("unknown statistic");
}

}  // namespace

std::uint64_t simulate_trial(SplitMix64& rng, int n_photons,
                             const ClickWeights& cw,
                             const DetectorConfig& det) {
  if (n_photons < 0) throw std::invalid_argument("n_photons must be >= 0");
  if (cw.q.size() != det.nu.size())
    throw std::invalid_argument("click weights and detectors disagree on N");
  if (cw.q.size() > 64)
    throw std::invalid_argument("Monte Carlo engine supports N <= 64");
  const std::vector<double> dark = dark_probs(det);
  return trial_mask(rng, n_photons, cw.q, dark);
}

ClickTable run_experiment(const PhotonNumberDistribution& pnd,
                          const MultiplexConfig& mux,
                          const DetectorConfig& det, std::uint64_t n_trials,
                          std::uint64_t seed, RunOptions opts) {
  validate_pair(mux, det);
  if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  const int N = mux.n_modes();
  if (N > 64)
    throw std::invalid_argument("Monte Carlo engine supports N <= 64");
  if (opts.workers < 1) throw std::invalid_argument("workers must be >= 1");

  const ClickWeights cw = effective_click_weights(mux, det);
  const std::vector<double> dark = dark_probs(det);

  // Sampling renormalizes the truncated source; the discarded mass is
  // reported on the table, not silently dropped.
  long double total = 0.0L;
  for (double v : pnd.probs) total += v;
  if (!(total > 0.0L))
    throw std::invalid_argument("source distribution has no mass");
  std::vector<double> cdf(pnd.probs.size());
  long double run = 0.0L;
  for (std::size_t i = 0; i < pnd.probs.size(); ++i) {
    run += pnd.probs[i];
    cdf[i] = static_cast<double>(run / total);
  }
  cdf.back() = 1.0;

  ClickTable table;
  table.n_modes = N;
  table.n_trials = n_trials;
  table.seed = seed;
  table.sampled_tail_mass = pnd.tail_mass;
  table.f.assign(N + 1, 0);
  table.w.assign(N, 0);
  if (opts.keep_raw) table.raw.assign(n_trials, 0);

  const int workers =
      static_cast<int>(std::min<std::uint64_t>(opts.workers, n_trials));
  std::vector<std::vector<std::uint64_t>> f_loc(
      workers, std::vector<std::uint64_t>(N + 1, 0));
  std::vector<std::vector<std::uint64_t>> w_loc(
      workers, std::vector<std::uint64_t>(N, 0));

  const auto run_chunk = [&](int slot, std::uint64_t lo, std::uint64_t hi) {
    auto& f = f_loc[slot];
    auto& w = w_loc[slot];
    for (std::uint64_t t = lo; t < hi; ++t) {
      SplitMix64 rng = SplitMix64::for_stream(seed, t);
      const double u = rng.next_double();
      const int n = static_cast<int>(
          std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      const std::uint64_t mask = trial_mask(rng, n, cw.q, dark);
      ++f[std::popcount(mask)];
      for (std::uint64_t m = mask; m; m &= m - 1) ++w[std::countr_zero(m)];
      if (opts.keep_raw) table.raw[t] = mask;
    }
  };

  if (workers == 1) {
    run_chunk(0, 0, n_trials);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (n_trials + workers - 1) / workers;
    for (int s = 0; s < workers; ++s) {
      const std::uint64_t lo = s * chunk;
      const std::uint64_t hi = std::min<std::uint64_t>(lo + chunk, n_trials);
      pool.emplace_back(run_chunk, s, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  // Merging integer counts is order-independent, so the result is identical
  // for every worker count.
  for (int s = 0; s < workers; ++s) {
    for (int k = 0; k <= N; ++k) table.f[k] += f_loc[s][k];
    for (int j = 0; j < N; ++j) table.w[j] += w_loc[s][j];
  }
  return table;
}

ClickStatistics estimate_statistics(const ClickTable& table) {
  if (table.n_trials == 0) throw std::invalid_argument("empty click table");
  return summarize(table.f, table.w, table.n_trials);
}

double bootstrap_stderr(const ClickTable& table, Statistic stat,
                        int resamples, std::uint64_t seed) {
  if (resamples < 1) throw std::invalid_argument("resamples must be >= 1");
  const int N = table.n_modes;
  const std::uint64_t M = table.n_trials;
  const bool needs_p = stat == Statistic::PoissonBinomialQ;
  if (needs_p && table.raw.empty())
    throw std::invalid_argument(
        "bootstrap of Q_PB needs per-trial raw masks; rerun with keep_raw");

  // Categories to resample: distinct click patterns when raw rows exist,
  // otherwise the click-number bins (enough for f-only statistics).
  std::vector<std::pair<std::uint64_t, std::uint64_t>> cats;  // value, count
  if (!table.raw.empty()) {
    std::unordered_map<std::uint64_t, std::uint64_t> hist;
    for (std::uint64_t mask : table.raw) ++hist[mask];
    cats.assign(hist.begin(), hist.end());
    std::sort(cats.begin(), cats.end());
  } else {
    for (int k = 0; k <= N; ++k)
      if (table.f[k] > 0) cats.emplace_back(k, table.f[k]);
  }
  std::vector<std::uint64_t> cum(cats.size());
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < cats.size(); ++i) {
    acc += cats[i].second;
    cum[i] = acc;
  }

  std::vector<double> values;
  values.reserve(resamples);
  std::vector<std::uint64_t> cnt(cats.size()), f(N + 1), w(N);
  for (int r = 0; r < resamples; ++r) {
    SplitMix64 rng = SplitMix64::for_stream(seed, r);
    std::fill(cnt.begin(), cnt.end(), 0);
    for (std::uint64_t d = 0; d < M; ++d) {
      const std::uint64_t u = rng.next_u64() % M;
      const std::size_t i =
          std::upper_bound(cum.begin(), cum.end(), u) - cum.begin();
      ++cnt[i];
    }
    std::fill(f.begin(), f.end(), 0);
    std::fill(w.begin(), w.end(), 0);
    for (std::size_t i = 0; i < cats.size(); ++i) {
      if (!table.raw.empty()) {
        const std::uint64_t mask = cats[i].first;
        f[std::popcount(mask)] += cnt[i];
        for (std::uint64_t m = mask; m; m &= m - 1)
          w[std::countr_zero(m)] += cnt[i];
      } else {
        f[cats[i].first] += cnt[i];
      }
    }
    try {
      values.push_back(evaluate(stat, f, w, M, N));
    } catch (const DegenerateStatisticsError&) {
      // a resample can lose all clicks; skip it rather than abort the run
    }
  }
  if (values.empty())
    throw DegenerateStatisticsError(
        "every bootstrap resample was degenerate", 0.0);

  long double mean = 0.0L;
  for (double v : values) mean += v;
  mean /= values.size();
  long double var = 0.0L;
  for (double v : values) {
    const long double d = v - mean;
    var += d * d;
  }
  // population spread: resamples = 1 gives the degenerate-but-defined 0
  return static_cast<double>(std::sqrt(var / values.size()));
}

}  // namespace clicksim
