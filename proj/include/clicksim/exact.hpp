#pragma once

#include <span>

#include "clicksim/click_statistics.hpp"
#include "clicksim/network.hpp"
#include "clicksim/sources.hpp"

namespace clicksim {

// Unbalanced configurations are enumerated over 2^N subsets; above this mode
// count the analytic engine refuses and the Monte Carlo engine is the way.
inline constexpr int kDefaultModeCap = 20;

// Conditional click distributions C(k|n) and marginals P(j|n) for a fixed
// network/detector pair, tabulated for n = 0..n_max.
struct ConditionalTables {
  int n_modes = 0;
  int n_max = 0;
  std::vector<double> c_given;  // (n_max+1) columns of length n_modes+1
  std::vector<double> p_given;  // (n_max+1) columns of length n_modes

  double c(int k, int n) const { return c_given[n * (n_modes + 1) + k]; }
  double p(int j, int n) const { return p_given[n * n_modes + j]; }
};

// One column (fixed n) produced by exhaustive enumeration; used as an
// independent cross-check of the subset-sum path.
struct ConditionalColumn {
  std::vector<double> c;  // size N+1
  std::vector<double> p;  // size N
};

// Probability that no detector in `subset` clicks when n photons enter:
// (1 - sum_{j in subset} q_j)^n * prod_{j in subset} e^{-nu_j}.
double no_click_prob(std::span<const int> subset, int n,
                     std::span<const double> q, std::span<const double> nu);

// C(k|n) via signed subset sums,
//   C(k|n) = sum_{|V| >= N-k} (-1)^{|V|-(N-k)} binom(|V|, N-k) * P0(V, n),
// accumulated in long double with compensation.  Balanced configurations
// (all q_j and nu_j equal) use the equivalent single-sum form and carry no
// mode-count cap; unbalanced ones require N <= mode_cap.
ConditionalTables conditional_tables(const MultiplexConfig& mux,
                                     const DetectorConfig& det, int n_max,
                                     int mode_cap = kDefaultModeCap);

// Enumerates all (N+1)^n per-photon outcomes, then folds in dark counts mode
// by mode.  Cost capped at (N+1)^n <= 1e7.
ConditionalColumn brute_force_tables(const MultiplexConfig& mux,
                                     const DetectorConfig& det, int n);

// Mixes precomputed tables over rho(n).  pnd.n_max must not exceed
// tables.n_max; truncated tail mass contributes nothing.
ClickStatistics mix_click_statistics(const ConditionalTables& tables,
                                     const PhotonNumberDistribution& pnd);

ClickStatistics exact_click_statistics(const PhotonNumberDistribution& pnd,
                                       const MultiplexConfig& mux,
                                       const DetectorConfig& det,
                                       int mode_cap = kDefaultModeCap);

// P(modes j and k both click) mixed over rho(n), from pairwise no-click
// probabilities.  j, k are 0-based and must differ.
double joint_click_prob(int j, int k, const PhotonNumberDistribution& pnd,
                        const MultiplexConfig& mux, const DetectorConfig& det);

// Q_PB from mode covariances instead of click-number moments:
//   sum_{j != k} (<pi_j pi_k> - p_j p_k) / sum_j p_j (1 - p_j).
// Needs only marginal and pairwise no-click probabilities, so it carries no
// mode-count cap.
double qpb_operator_form(const PhotonNumberDistribution& pnd,
                         const MultiplexConfig& mux,
                         const DetectorConfig& det);

}  // namespace clicksim
