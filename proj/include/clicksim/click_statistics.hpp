#pragma once

#include <vector>

namespace clicksim {

// Click-number distribution c_k (k = 0..N simultaneous clicks) together with
// the per-mode marginals p_j and the four summary quantities every witness
// is built from:
//   mean_c   = sum_k k c_k
//   var_c    = sum_k (k - mean_c)^2 c_k
//   m        = (1/N) sum_j p_j
//   sigma_sq = (1/N) sum_j (p_j - m)^2
struct ClickStatistics {
  std::vector<double> c;  // size N+1
  std::vector<double> p;  // size N
  double mean_c = 0.0;
  double var_c = 0.0;
  double m = 0.0;
  double sigma_sq = 0.0;
};

ClickStatistics click_summary(std::vector<double> c, std::vector<double> p);

}  // namespace clicksim
