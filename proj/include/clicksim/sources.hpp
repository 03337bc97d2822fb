#pragma once

#include <vector>

namespace clicksim {

inline constexpr int kDefaultNMax = 30;
inline constexpr double kDefaultTailTol = 1e-6;

enum class StateFamily { Coherent, Thermal, Fock, OddCoherent, Spats, Custom };

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

// Photon-number distribution truncated at n_max.  probs[n] holds rho(n) for
// n = 0..n_max.  The mass beyond the truncation is carried in tail_mass and
// is never redistributed over the kept entries, so sum(probs) + tail_mass = 1.
struct PhotonNumberDistribution {
  std::vector<double> probs;
  int n_max = 0;
  StateFamily family = StateFamily::Custom;
  double param = 0.0;  // nbar, m, |alpha|^2 or n_th depending on family
  double tail_mass = 0.0;
};

// rho(n) = e^{-nbar} nbar^n / n!
PhotonNumberDistribution coherent_pnd(double mean, int n_max = kDefaultNMax,
                                      double tail_tol = kDefaultTailTol);

// rho(n) = nbar^n / (1 + nbar)^{n+1}
PhotonNumberDistribution thermal_pnd(double mean, int n_max = kDefaultNMax,
                                     double tail_tol = kDefaultTailTol);

// rho(n) = delta_{n,m}
PhotonNumberDistribution fock_pnd(int m, int n_max = kDefaultNMax);

// Odd coherent state |alpha> - |-alpha>: rho(n) = 4 e^{-a} a^n / (n! N_-)
// for odd n only, with a = |alpha|^2 and N_- = 2 (1 - e^{-2a}).
PhotonNumberDistribution odd_coherent_pnd(double alpha_sq,
                                          int n_max = kDefaultNMax,
                                          double tail_tol = kDefaultTailTol);

// Single-photon-added thermal state:
// rho(n) = n / (nt (nt+1)) * (nt / (nt+1))^n, mean = 1 + 2 nt.
PhotonNumberDistribution spats_pnd(double n_th, int n_max = kDefaultNMax,
                                   double tail_tol = kDefaultTailTol);

// Mean of the (untruncated) odd coherent state: a coth(a), a = |alpha|^2.
double odd_coherent_mean(double alpha_sq);

// Inverts odd_coherent_mean by bisection.  target_mean must be > 1; the mean
// only approaches 1 as alpha -> 0.
double solve_odd_coherent_alpha(double target_mean);

// Mean and variance over the truncated support (no renormalization).
Moments moments(const PhotonNumberDistribution& pnd);

}  // namespace clicksim
