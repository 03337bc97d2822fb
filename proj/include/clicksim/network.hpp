#pragma once

#include <vector>

namespace clicksim {

enum class MuxScheme { Uniform, Ring, Custom };

// Splitting weights |u_j|^2 of the multiplexing network.  tail_loss is the
// intensity that never reaches a detector (e.g. light still circulating in
// the ring after the last extraction), so sum(weights) + tail_loss = 1.
struct MultiplexConfig {
  std::vector<double> weights;
  double tail_loss = 0.0;
  MuxScheme scheme = MuxScheme::Custom;
  double kappa = 0.0;  // ring coupling, Ring scheme only
  int n_modes() const { return static_cast<int>(weights.size()); }
};

// Per-detector efficiency eta_j in [0,1] and dark-count rate nu_j >= 0.
struct DetectorConfig {
  std::vector<double> eta;
  std::vector<double> nu;
};

// Per-mode single-photon click probabilities q_j = |u_j|^2 eta_j and the
// complementary per-photon loss probability q_loss = 1 - sum q_j.
struct ClickWeights {
  std::vector<double> q;
  double q_loss = 0.0;
};

MultiplexConfig uniform_splitter(int n_modes);

// Ring resonator tapped n_trc times with coupling kappa in (0,1):
// |u_1|^2 = 1 - kappa, |u_j|^2 = kappa^2 (1-kappa)^{j-2} for j >= 2,
// tail_loss = kappa (1-kappa)^{n_trc - 1}.
MultiplexConfig ring_resonator(double kappa, int n_trc);

// Arbitrary weights; refuses to renormalize, so sum + tail_loss must already
// be 1 within 1e-9.
MultiplexConfig custom_config(std::vector<double> weights, double tail_loss);

DetectorConfig uniform_detector(int n_modes, double eta, double nu = 0.0);
DetectorConfig make_detector(std::vector<double> eta, std::vector<double> nu);

// Convenience: per-mode transmission loss gamma_j and detection efficiency
// xi_j combine into eta_j = (1 - gamma_j) xi_j.
DetectorConfig detector_from_channel(const std::vector<double>& gamma,
                                     const std::vector<double>& xi,
                                     std::vector<double> nu = {});

// Throws if mux and det describe different mode counts or invalid entries.
void validate_pair(const MultiplexConfig& mux, const DetectorConfig& det);

ClickWeights effective_click_weights(const MultiplexConfig& mux,
                                     const DetectorConfig& det);

}  // namespace clicksim
