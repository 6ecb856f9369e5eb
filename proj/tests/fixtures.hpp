#pragma once

#include "netmed/graph.hpp"
#include "netmed/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace fixture {

// Unit-norm latent rows spread around the circle with a little angular jitter.
inline Eigen::MatrixXd circle_u(int n, std::uint64_t seed, double jitter = 0.1) {
  netmed::Rng rng(seed);
  Eigen::MatrixXd u(n, 2);
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * i / n + jitter * rng.normal();
    u(i, 0) = std::cos(t);
    u(i, 1) = std::sin(t);
  }
  return u;
}

inline std::vector<std::string> two_blocks(int n) {
  std::vector<std::string> g;
  for (int i = 0; i < n; ++i) g.push_back(i < n / 2 ? "g1" : "g2");
  return g;
}

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

}  // namespace fixture
