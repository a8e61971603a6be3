#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mmrw {

/// Rejected input: malformed file, broken model invariant, or a violated
/// precondition of an operation.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric failure: non-convergence, overflow, singular system, or an
/// unbounded search bracket.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two-dimensional skip-free Markov-modulated random walk.
///
/// The walk lives on Z^2 x {0,..,s0-1}; both coordinates move by at most one
/// per step and the increment distribution is selected by the background
/// state. The nine s0 x s0 blocks A(i,j), i,j in {-1,0,1}, hold the joint
/// transition probabilities; their sum is the (stochastic) transition matrix
/// of the background chain.
struct MMRWModel {
  int s0 = 0;
  std::array<Eigen::MatrixXd, 9> blocks;

  static MMRWModel zeros(int s0);

  const Eigen::MatrixXd& block(int i, int j) const {
    return blocks[static_cast<std::size_t>(3 * (i + 1) + (j + 1))];
  }
  Eigen::MatrixXd& block(int i, int j) {
    return blocks[static_cast<std::size_t>(3 * (i + 1) + (j + 1))];
  }

  /// Sum of all nine blocks (the background transition matrix).
  Eigen::MatrixXd total() const;

  /// Throws ModelError unless all entries are in [0,1] and every row sum of
  /// total() equals 1 within 1e-12.
  void check() const;
};

/// Mean increment vector together with the stationary distribution of the
/// background chain it was computed from.
struct DriftVector {
  double a1 = 0;
  double a2 = 0;
  Eigen::VectorXd pi;
};

/// Heuristic chain diagnostics. Reachability results are hints computed on
/// finite windows, not proofs about the infinite lattice.
struct ValidationReport {
  bool stochastic = false;
  bool aperiodic_hint = false;
  bool p_irreducible_hint = false;
  bool p_plus_irreducible_hint = false;
  DriftVector drift;
  bool assumption2_satisfied = false;  // a1 < 0 or a2 < 0
  int window_size = 0;
};

/// Parses the JSON model file format:
///   { "s0": n, "blocks": { "<i>,<j>": [[...]] } }
/// Omitted block keys mean zero blocks; entries may be numbers or decimal
/// strings. Throws ModelError on malformed input or invariant violations.
MMRWModel parse_model(const std::string& text);

/// Inverse of parse_model up to zero-block omission; numbers keep enough
/// digits to round-trip bit-exactly.
std::string serialize_model(const MMRWModel& model);

ValidationReport validate(const MMRWModel& model, int window = 6);

/// Stationary distribution of the background chain and the mean increment
/// per step. Throws NumericError when the background chain is reducible.
DriftVector drift(const MMRWModel& model);

/// Model with A'(i,j) = A(j,i); an involution.
MMRWModel swap_axes(const MMRWModel& model);

/// Throws ModelError naming the drift values unless a1 < 0 or a2 < 0.
void require_negative_drift(const MMRWModel& model);

}  // namespace mmrw
