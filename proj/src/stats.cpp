#include "clicksim/stats.hpp"

#include <stdexcept>
#include <string>

#include "clicksim/errors.hpp"

namespace clicksim {

double mandel_q(double mean_n, double var_n) {
  if (!(mean_n > 0.0))
    throw DegenerateStatisticsError(
        "mean photon number is not positive; Mandel Q undefined", mean_n);
  return var_n / mean_n - 1.0;
}

double binomial_q(const ClickStatistics& stats, int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("n_modes must be >= 1");
  const double mc = stats.mean_c;
  if (!(mc > 0.0))
    throw DegenerateStatisticsError(
        "no clicks observed (mean click number is zero); Q_B undefined", mc);
  if (!(mc < n_modes))
    throw DegenerateStatisticsError(
        "every detector clicked in every trial; Q_B undefined", mc);
  return n_modes * stats.var_c / (mc * (n_modes - mc)) - 1.0;
}

double poisson_binomial_q(const ClickStatistics& stats, int n_modes,
                          double eps) {
  if (n_modes < 1) throw std::invalid_argument("n_modes must be >= 1");
  const double mc = stats.mean_c;
  const double denom =
      mc * (n_modes - mc) - double(n_modes) * n_modes * stats.sigma_sq;
  if (!(denom > eps)) {
    if (!(mc > 0.0))
      throw DegenerateStatisticsError(
          "no clicks observed (mean click number is zero); Q_PB undefined",
          denom);
    throw DegenerateStatisticsError(
        "Q_PB denominator <c>(N-<c>) - N^2 sigma^2 = " +
            std::to_string(denom) + " is <= " + std::to_string(eps) +
            "; statistics too degenerate",
        denom);
  }
  return n_modes * stats.var_c / denom - 1.0;
}

double spats_qm_closed(double n_th, double eta) {
  if (!(n_th >= 0.0)) throw std::invalid_argument("n_th must be >= 0");
  if (!(eta > 0.0 && eta <= 1.0))
    throw std::invalid_argument("eta must be in (0,1]");
  return eta * (n_th * n_th - 0.5) / (n_th + 0.5);
}

double spats_qb_closed(double n_th, double eta, int n_modes) {
  if (!(n_th >= 0.0)) throw std::invalid_argument("n_th must be >= 0");
  if (!(eta > 0.0 && eta <= 1.0))
    throw std::invalid_argument("eta must be in (0,1]");
  if (n_modes < 2)
    throw std::invalid_argument("closed-form Q_B needs n_modes >= 2");
  const auto I = [n_th](double lam) {
    const double b = 1.0 + lam * n_th;
    return (1.0 - lam) / (b * b);
  };
  const double i1 = I(eta / n_modes);
  const double i2 = I(2.0 * eta / n_modes);
  const double denom = i1 * (1.0 - i1);
  if (!(denom > kDegenerateEps))
    throw DegenerateStatisticsError(
        "closed-form Q_B denominator I(1-I) = " + std::to_string(denom) +
            " is degenerate",
        denom);
  return (n_modes - 1) * (i2 - i1 * i1) / denom;
}

}  // namespace clicksim
