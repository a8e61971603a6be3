#pragma once

#include <cstdint>
#include <string>

#include "mmrw/model.hpp"

namespace fixtures {

// Scalar reference walk: drift (-0.2, -0.2), symmetric in the axes.
inline mmrw::MMRWModel r1() {
  mmrw::MMRWModel m = mmrw::MMRWModel::zeros(1);
  m.block(-1, 0)(0, 0) = 0.3;
  m.block(1, 0)(0, 0) = 0.1;
  m.block(0, -1)(0, 0) = 0.3;
  m.block(0, 1)(0, 0) = 0.1;
  m.block(0, 0)(0, 0) = 0.2;
  return m;
}

// Deterministic diagonal descent; leaves the quadrant in min(x1, x2) + 1 steps.
inline mmrw::MMRWModel r0() {
  mmrw::MMRWModel m = mmrw::MMRWModel::zeros(1);
  m.block(-1, -1)(0, 0) = 1.0;
  return m;
}

// R1's jump probabilities routed through a sticky 2-state background channel;
// the Perron root is identical to R1's at every theta.
inline mmrw::MMRWModel r2() {
  mmrw::MMRWModel m = mmrw::MMRWModel::zeros(2);
  Eigen::MatrixXd T(2, 2);
  T << 0.9, 0.1, 0.1, 0.9;
  const mmrw::MMRWModel base = r1();
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) m.block(i, j) = base.block(i, j)(0, 0) * T;
  return m;
}

// Deterministic uniform stream for property tests.
struct Uniform {
  std::uint64_t x;
  explicit Uniform(std::uint64_t seed) : x(seed) {}
  double operator()(double lo, double hi) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return lo + (hi - lo) * (static_cast<double>(z >> 11) * 0x1.0p-53);
  }
};

inline std::string r1_json() {
  return R"({"s0": 1, "blocks": {
    "-1,0": [[0.3]], "1,0": [[0.1]], "0,-1": [[0.3]], "0,1": [[0.1]], "0,0": [[0.2]]
  }})";
}

inline std::string r0_json() { return R"({"s0": 1, "blocks": {"-1,-1": [[1]]}})"; }

// Deterministic dense stochastic model; jumps toward larger coordinates are
// damped so the drift is negative in both components.
inline mmrw::MMRWModel random_model(int s0, std::uint64_t seed) {
  std::uint64_t x = seed;
  auto next_uniform = [&x]() {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  };
  mmrw::MMRWModel m = mmrw::MMRWModel::zeros(s0);
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) {
      const double damp = 1.0 / ((i == 1 ? 3.0 : 1.0) * (j == 1 ? 3.0 : 1.0));
      for (int r = 0; r < s0; ++r)
        for (int c = 0; c < s0; ++c)
          m.block(i, j)(r, c) = damp * (0.05 + next_uniform());
    }
  Eigen::VectorXd sums = m.total().rowwise().sum();
  for (auto& b : m.blocks)
    for (int r = 0; r < s0; ++r) b.row(r) /= sums[r];
  return m;
}

}  // namespace fixtures
