#pragma once

#include <optional>

#include "clicksim/click_statistics.hpp"

namespace clicksim {

// Denominators at or below this are treated as degenerate.
inline constexpr double kDegenerateEps = 1e-12;

// Q_M = <(dn)^2> / <n> - 1.  Requires mean_n > 0.
double mandel_q(double mean_n, double var_n);

// Q_B = N <(dc)^2> / (<c>(N - <c>)) - 1.  Requires 0 < <c> < N.
double binomial_q(const ClickStatistics& stats, int n_modes);

// Q_PB = N <(dc)^2> / (<c>(N - <c>) - N^2 sigma^2) - 1.  Throws
// DegenerateStatisticsError when the denominator is <= eps; never returns
// NaN or infinity.
double poisson_binomial_q(const ClickStatistics& stats, int n_modes,
                          double eps = kDegenerateEps);

// Closed-form Mandel parameter of the single-photon-added thermal state
// seen through efficiency eta: Q_M = eta (n_th^2 - 1/2) / (n_th + 1/2).
double spats_qm_closed(double n_th, double eta);

// Closed-form binomial parameter of the same state behind a balanced
// N-mode splitter, with I(lam) = (1 - lam) / (1 + lam n_th)^2:
// Q_B = (N-1) (I(2 eta/N) - I(eta/N)^2) / (I(eta/N) (1 - I(eta/N))).
double spats_qb_closed(double n_th, double eta, int n_modes);

enum class Provenance { Exact, MonteCarlo };

struct QReport {
  std::optional<double> q_m;  // from source moments when defined
  double q_b = 0.0;
  double q_pb = 0.0;
  Provenance provenance = Provenance::Exact;
  std::optional<double> stderr_pb;  // bootstrap, Monte Carlo only
  int n_modes = 0;
};

}  // namespace clicksim
