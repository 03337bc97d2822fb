#pragma once

#include <cstdint>
#include <string>

#include "clicksim/network.hpp"
#include "clicksim/sources.hpp"

namespace clicksim {

enum class EngineKind { Exact, MonteCarlo };

// One experiment: a source, a network, detectors and an engine choice.
// Parsed from the sectioned key=value format described in the README.
struct ExperimentConfig {
  // [source]
  StateFamily family = StateFamily::Coherent;
  double mean = 1.0;      // coherent / thermal / odd_coherent target mean
  double alpha_sq = 0.0;  // odd_coherent |alpha|^2 (resolved at parse time)
  int fock_m = 1;
  double n_th = 1.0;
  int n_max = kDefaultNMax;
  double tail_tol = kDefaultTailTol;

  // [network]
  MuxScheme scheme = MuxScheme::Ring;
  int n_modes = 10;  // uniform scheme
  double kappa = 0.6;
  int n_trc = 10;
  std::vector<double> weights;  // custom scheme
  double tail_loss = 0.0;

  // [detector] - single entry broadcasts over all modes
  std::vector<double> eta{1.0};
  std::vector<double> nu{0.0};

  // [engine]
  EngineKind engine = EngineKind::Exact;
  std::uint64_t trials = 1000000;
  std::uint64_t seed = 1;
  bool keep_raw = false;
  int workers = 1;
};

// Throws ConfigError with "file:line:" prefixes on malformed input or any
// value that violates a module precondition.
ExperimentConfig parse_config_file(const std::string& path);

PhotonNumberDistribution build_source(const ExperimentConfig& cfg);
MultiplexConfig build_network(const ExperimentConfig& cfg);
DetectorConfig build_detector(const ExperimentConfig& cfg, int n_modes);

}  // namespace clicksim
