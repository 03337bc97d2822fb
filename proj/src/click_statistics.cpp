#include "clicksim/click_statistics.hpp"

#include <stdexcept>

namespace clicksim {

ClickStatistics click_summary(std::vector<double> c, std::vector<double> p) {
  if (p.empty() || c.size() != p.size() + 1)
    throw std::invalid_argument(
        "click_summary needs c of size N+1 and p of size N");
  ClickStatistics s;
  const int n_modes = static_cast<int>(p.size());
  long double mean = 0.0L;
  for (int k = 0; k <= n_modes; ++k) mean += (long double)k * c[k];
  long double var = 0.0L;
  for (int k = 0; k <= n_modes; ++k) {
    const long double d = k - mean;
    var += d * d * c[k];
  }
  long double psum = 0.0L;
  for (double v : p) psum += v;
  const long double m = psum / n_modes;
  long double s2 = 0.0L;
  for (double v : p) {
    const long double d = v - m;
    s2 += d * d;
  }
  s.mean_c = static_cast<double>(mean);
  s.var_c = static_cast<double>(var);
  s.m = static_cast<double>(m);
  s.sigma_sq = static_cast<double>(s2 / n_modes);
  s.c = std::move(c);
  s.p = std::move(p);
  return s;
}

}  // namespace clicksim
