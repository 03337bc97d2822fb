#include <cmath>

#include "clicksim/errors.hpp"
#include "clicksim/network.hpp"
#include "doctest.h"

using namespace clicksim;

TEST_CASE("uniform splitter weights") {
  const auto mux = uniform_splitter(4);
  REQUIRE(mux.n_modes() == 4);
  for (double w : mux.weights) CHECK(w == doctest::Approx(0.25));
  CHECK(mux.tail_loss == 0.0);
  CHECK_THROWS_AS(uniform_splitter(0), std::invalid_argument);
}

TEST_CASE("ring resonator weights form a geometric cascade") {
  const auto mux = ring_resonator(0.6, 4);
  REQUIRE(mux.n_modes() == 4);
  CHECK(mux.weights[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(mux.weights[1] == doctest::Approx(0.36).epsilon(1e-15));
  CHECK(mux.weights[2] == doctest::Approx(0.144).epsilon(1e-15));
  CHECK(mux.weights[3] == doctest::Approx(0.0576).epsilon(1e-15));
  CHECK(mux.tail_loss == doctest::Approx(0.6 * std::pow(0.4, 3)).epsilon(1e-15));
  long double total = mux.tail_loss;
  for (double w : mux.weights) total += w;
  CHECK(static_cast<double>(total) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("ring resonator rejects out-of-range parameters") {
  CHECK_THROWS_AS(ring_resonator(0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(ring_resonator(1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(ring_resonator(-0.2, 4), std::invalid_argument);
  CHECK_THROWS_AS(ring_resonator(0.6, 0), std::invalid_argument);
}

TEST_CASE("custom weights must already be normalized") {
  CHECK_NOTHROW(custom_config({0.5, 0.3, 0.15}, 0.05));
  CHECK_THROWS_AS(custom_config({0.5, 0.3, 0.15}, 0.2),
                  std::invalid_argument);
  CHECK_THROWS_AS(custom_config({0.5, -0.1, 0.6}, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(custom_config({}, 1.0), std::invalid_argument);
}

TEST_CASE("detector constructors and validation") {
  const auto det = uniform_detector(3, 0.8, 0.01);
  REQUIRE(det.eta.size() == 3);
  REQUIRE(det.nu.size() == 3);
  CHECK(det.eta[2] == 0.8);
  CHECK(det.nu[0] == 0.01);

  CHECK_THROWS_AS(make_detector({0.5, 0.5}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_detector({1.2}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_detector({-0.1}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_detector({0.5}, {-0.1}), std::invalid_argument);

  const auto mux = uniform_splitter(3);
  CHECK_NOTHROW(validate_pair(mux, det));
  CHECK_THROWS(validate_pair(mux, uniform_detector(4, 1.0)));
}

TEST_CASE("channel loss and detection efficiency combine multiplicatively") {
  const auto det = detector_from_channel({0.2, 0.0}, {0.5, 0.9});
  CHECK(det.eta[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(det.eta[1] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(det.nu[0] == 0.0);
  CHECK_THROWS_AS(detector_from_channel({1.5}, {0.5}), std::invalid_argument);
}

TEST_CASE("effective click weights") {
  const auto mux = ring_resonator(0.6, 3);
  const auto det = make_detector({1.0, 0.5, 0.25}, {0.0, 0.0, 0.0});
  const auto cw = effective_click_weights(mux, det);
  CHECK(cw.q[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(cw.q[1] == doctest::Approx(0.18).epsilon(1e-15));
  CHECK(cw.q[2] == doctest::Approx(0.036).epsilon(1e-15));
  // photons in the ring tail or eaten by eta < 1 count as lost
  CHECK(cw.q_loss == doctest::Approx(1.0 - 0.4 - 0.18 - 0.036).epsilon(1e-14));
}

TEST_CASE("perfectly transmitting balanced network has zero loss") {
  const auto cw = effective_click_weights(uniform_splitter(5),
                                           uniform_detector(5, 1.0));
  CHECK(cw.q_loss == doctest::Approx(0.0).epsilon(1e-15));
}
