#include "clicksim/sources.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "clicksim/errors.hpp"

namespace clicksim {

namespace {

void check_n_max(int n_max) {
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
}

// Finalizes a distribution: tail_mass = 1 - sum(probs), clamped at 0 so the
// identity sum + tail = 1 holds to rounding even when the kept mass rounds
// slightly above 1.
void set_tail(PhotonNumberDistribution& pnd, double tail_tol,
              const std::string& what) {
  long double sum = 0.0L;
  for (double v : pnd.probs) sum += v;
  pnd.tail_mass = std::max(0.0, static_cast<double>(1.0L - sum));
  if (pnd.tail_mass >= tail_tol) {
    throw TailToleranceError(
        what + ": truncated tail mass " + std::to_string(pnd.tail_mass) +
            " exceeds tolerance " + std::to_string(tail_tol) +
            " (n_max = " + std::to_string(pnd.n_max) + " too small)",
        pnd.tail_mass);
  }
}

}  // namespace

PhotonNumberDistribution coherent_pnd(double mean, int n_max,
                                      double tail_tol) {
  check_n_max(n_max);
  if (!(mean >= 0.0))
    throw std::invalid_argument("coherent mean must be >= 0");
  PhotonNumberDistribution pnd;
  pnd.n_max = n_max;
  pnd.family = StateFamily::Coherent;
  pnd.param = mean;
  pnd.probs.assign(n_max + 1, 0.0);
  if (mean == 0.0) {
    pnd.probs[0] = 1.0;
    return pnd;
  }
  for (int n = 0; n <= n_max; ++n)
    pnd.probs[n] = std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
  set_tail(pnd, tail_tol, "coherent_pnd");
  return pnd;
}

PhotonNumberDistribution thermal_pnd(double mean, int n_max, double tail_tol) {
  check_n_max(n_max);
  if (!(mean >= 0.0)) throw std::invalid_argument("thermal mean must be >= 0");
  PhotonNumberDistribution pnd;
  pnd.n_max = n_max;
  pnd.family = StateFamily::Thermal;
  pnd.param = mean;
  pnd.probs.assign(n_max + 1, 0.0);
  if (mean == 0.0) {
    pnd.probs[0] = 1.0;
    return pnd;
  }
  const double r = mean / (1.0 + mean);
  double term = 1.0 / (1.0 + mean);  // rho(0)
  for (int n = 0; n <= n_max; ++n) {
    pnd.probs[n] = term;
    term *= r;
  }
  set_tail(pnd, tail_tol, "thermal_pnd");
  return pnd;
}

PhotonNumberDistribution fock_pnd(int m, int n_max) {
  check_n_max(n_max);
  if (m < 0) throw std::invalid_argument("fock m must be >= 0");
  if (m > n_max)
    throw std::invalid_argument("fock m = " + std::to_string(m) +
                                " exceeds n_max = " + std::to_string(n_max));
  PhotonNumberDistribution pnd;
  pnd.n_max = n_max;
  pnd.family = StateFamily::Fock;
  pnd.param = m;
  pnd.probs.assign(n_max + 1, 0.0);
  pnd.probs[m] = 1.0;
  return pnd;
}

PhotonNumberDistribution odd_coherent_pnd(double alpha_sq, int n_max,
                                          double tail_tol) {
  check_n_max(n_max);
  if (!(alpha_sq > 0.0))
    throw std::invalid_argument("odd_coherent |alpha|^2 must be > 0");
  PhotonNumberDistribution pnd;
  pnd.n_max = n_max;
  pnd.family = StateFamily::OddCoherent;
  pnd.param = alpha_sq;
  pnd.probs.assign(n_max + 1, 0.0);
  // N_- = 2 (1 - e^{-2a}); expm1 keeps it accurate for small a.
  const double log_norm = std::log(-2.0 * std::expm1(-2.0 * alpha_sq));
  for (int n = 1; n <= n_max; n += 2)
    pnd.probs[n] = std::exp(std::log(4.0) - alpha_sq +
                            n * std::log(alpha_sq) - std::lgamma(n + 1.0) -
                            log_norm);
  set_tail(pnd, tail_tol, "odd_coherent_pnd");
  return pnd;
}

PhotonNumberDistribution spats_pnd(double n_th, int n_max, double tail_tol) {
  check_n_max(n_max);
  if (!(n_th >= 0.0)) throw std::invalid_argument("spats n_th must be >= 0");
  if (n_max < 1)
    throw std::invalid_argument("spats needs n_max >= 1 (rho(0) = 0)");
  PhotonNumberDistribution pnd;
  pnd.n_max = n_max;
  pnd.family = StateFamily::Spats;
  pnd.param = n_th;
  pnd.probs.assign(n_max + 1, 0.0);
  if (n_th == 0.0) {
    pnd.probs[1] = 1.0;  // adding one photon to vacuum
    return pnd;
  }
  const double y = n_th / (1.0 + n_th);
  double yp = y;  // y^n
  const double c0 = 1.0 / (n_th * (1.0 + n_th));
  for (int n = 1; n <= n_max; ++n) {
    pnd.probs[n] = n * c0 * yp;
    yp *= y;
  }
  set_tail(pnd, tail_tol, "spats_pnd");
  return pnd;
}

double odd_coherent_mean(double alpha_sq) {
  if (!(alpha_sq > 0.0))
    throw std::invalid_argument("odd_coherent |alpha|^2 must be > 0");
  return alpha_sq / std::tanh(alpha_sq);
}

double solve_odd_coherent_alpha(double target_mean) {
  if (!(target_mean > 1.0))
    throw std::invalid_argument(
        "odd_coherent mean is > 1 for every alpha; cannot solve for " +
        std::to_string(target_mean));
  double lo = 1e-9;
  double hi = std::max(10.0, 2.0 * target_mean);
  // a coth(a) is strictly increasing, and f(hi) >= hi > target, so the
  // bracket is valid from the start.
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, lo); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (odd_coherent_mean(mid) < target_mean)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Moments moments(const PhotonNumberDistribution& pnd) {
  long double mean = 0.0L;
  for (int n = 0; n <= pnd.n_max; ++n) mean += (long double)n * pnd.probs[n];
  long double var = 0.0L;
  for (int n = 0; n <= pnd.n_max; ++n) {
    const long double d = n - mean;
    var += d * d * pnd.probs[n];
  }
  return Moments{static_cast<double>(mean), static_cast<double>(var)};
}

}  // namespace clicksim
