#include "clicksim/network.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace clicksim {

MultiplexConfig uniform_splitter(int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("n_modes must be >= 1");
  MultiplexConfig mux;
  mux.scheme = MuxScheme::Uniform;
  mux.weights.assign(n_modes, 1.0 / n_modes);
  mux.tail_loss = 0.0;
  return mux;
}

MultiplexConfig ring_resonator(double kappa, int n_trc) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw std::invalid_argument("ring kappa must be in (0,1)");
  if (n_trc < 1) throw std::invalid_argument("ring n_trc must be >= 1");
  MultiplexConfig mux;
  mux.scheme = MuxScheme::Ring;
  mux.kappa = kappa;
  mux.weights.resize(n_trc);
  mux.weights[0] = 1.0 - kappa;
  double w = kappa * kappa;  // |u_2|^2
  for (int j = 1; j < n_trc; ++j) {
    mux.weights[j] = w;
    w *= 1.0 - kappa;
  }
  mux.tail_loss = kappa * std::pow(1.0 - kappa, n_trc - 1);
  return mux;
}

MultiplexConfig custom_config(std::vector<double> weights, double tail_loss) {
  if (weights.empty()) throw std::invalid_argument("weights must be nonempty");
  for (double w : weights)
    if (!(w >= 0.0))
      throw std::invalid_argument("weights entries must be >= 0");
  if (!(tail_loss >= 0.0))
    throw std::invalid_argument("tail_loss must be >= 0");
  long double sum = tail_loss;
  for (double w : weights) sum += w;
  const double total = static_cast<double>(sum);
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument(
        "weights + tail_loss sum to " + std::to_string(total) +
        ", not 1; renormalization is refused, fix the inputs");
  MultiplexConfig mux;
  mux.scheme = MuxScheme::Custom;
  mux.weights = std::move(weights);
  mux.tail_loss = tail_loss;
  return mux;
}

DetectorConfig make_detector(std::vector<double> eta, std::vector<double> nu) {
  if (eta.empty()) throw std::invalid_argument("eta must be nonempty");
  if (nu.empty()) nu.assign(eta.size(), 0.0);
  if (nu.size() != eta.size())
    throw std::invalid_argument("eta and nu lengths differ");
  for (double e : eta)
    if (!(e >= 0.0 && e <= 1.0))
      throw std::invalid_argument("eta entries must be in [0,1]");
  for (double v : nu)
    if (!(v >= 0.0)) throw std::invalid_argument("nu entries must be >= 0");
  return DetectorConfig{std::move(eta), std::move(nu)};
}

DetectorConfig uniform_detector(int n_modes, double eta, double nu) {
  if (n_modes < 1) throw std::invalid_argument("n_modes must be >= 1");
  return make_detector(std::vector<double>(n_modes, eta),
                       std::vector<double>(n_modes, nu));
}

DetectorConfig detector_from_channel(const std::vector<double>& gamma,
                                     const std::vector<double>& xi,
                                     std::vector<double> nu) {
  if (gamma.size() != xi.size())
    throw std::invalid_argument("gamma and xi lengths differ");
  std::vector<double> eta(gamma.size());
  for (std::size_t j = 0; j < gamma.size(); ++j) {
    if (!(gamma[j] >= 0.0 && gamma[j] <= 1.0))
      throw std::invalid_argument("gamma entries must be in [0,1]");
    if (!(xi[j] >= 0.0 && xi[j] <= 1.0))
      throw std::invalid_argument("xi entries must be in [0,1]");
    eta[j] = (1.0 - gamma[j]) * xi[j];
  }
  return make_detector(std::move(eta), std::move(nu));
}

void validate_pair(const MultiplexConfig& mux, const DetectorConfig& det) {
  if (mux.weights.empty())
    throw std::invalid_argument("network has no modes");
  if (det.eta.size() != mux.weights.size() ||
      det.nu.size() != mux.weights.size())
    throw std::invalid_argument(
        "detector count " + std::to_string(det.eta.size()) +
        " does not match mode count " + std::to_string(mux.weights.size()));
}

ClickWeights effective_click_weights(const MultiplexConfig& mux,
                                     const DetectorConfig& det) {
  validate_pair(mux, det);
  ClickWeights cw;
  cw.q.resize(mux.weights.size());
  long double sum = 0.0L;
  for (std::size_t j = 0; j < cw.q.size(); ++j) {
    cw.q[j] = mux.weights[j] * det.eta[j];
    sum += cw.q[j];
  }
  cw.q_loss = std::max(0.0, static_cast<double>(1.0L - sum));
  return cw;
}

}  // namespace clicksim
