#pragma once

#include <array>
#include <string>

#include <Eigen/Dense>

#include "mmrw/model.hpp"

namespace mmrw {

/// Level/phase re-blockings of the quadrant walk: level x1 (phase x2),
/// level x2 (phase x1), or level min(x1,x2) (phase x1-x2).
enum class QbdAlpha { One, Two, DiagOneOne };

QbdAlpha parse_alpha(const std::string& text);  // "1", "2", "11"
std::string alpha_name(QbdAlpha alpha);

/// One-step blocks of the level process with the phase space truncated by
/// killing: phases 0..K for One/Two, -K..K for DiagOneOne. Row sums of the
/// block sum are <= 1, with equality away from the truncation edge.
struct QbdTriple {
  QbdAlpha alpha = QbdAlpha::One;
  int K = 0;
  int s0 = 0;
  Eigen::MatrixXd A_minus, A_zero, A_plus;
};

QbdTriple build_qbd(const MMRWModel& model, QbdAlpha alpha, int K);

/// Minimal nonnegative solution of R = A_plus + R A_zero + R^2 A_minus,
/// reached from 0 by the monotone fixed-point iteration.
struct RateMatrix {
  Eigen::MatrixXd R;
  long iterations = 0;
  double residual = 0;
};

RateMatrix solve_rate_matrix(const QbdTriple& triple);
RateMatrix solve_rate_matrix(const Eigen::MatrixXd& A_minus, const Eigen::MatrixXd& A_zero,
                             const Eigen::MatrixXd& A_plus);

/// Convergence parameter of R: reciprocal spectral radius, +infinity for the
/// zero matrix. Its log approaches the directional decay rate of the level
/// process from above as the phase truncation grows.
double cp_estimate(const RateMatrix& rate);

/// Max absolute deviation between the matrix-geometric occupation values
/// N00 R^k and the truncated-table oracle, over levels k <= k_max and phases
/// in the central window (<= K/2). Only the axis representations apply.
double matrix_geometric_check(const MMRWModel& model, QbdAlpha alpha, int K, int k_max);

/// Quotient/remainder re-blocking by a direction c: a walk with background
/// size c1*c2*s0 whose diagonal asymptotics are the direction-c asymptotics
/// of the base walk.
struct ExpandedModel {
  MMRWModel base;
  std::array<int, 2> c{};
  MMRWModel expanded;
};

ExpandedModel c_expand(const MMRWModel& model, int c1, int c2);

/// k x k block wrap of a tridiagonal triple: C_zero on the diagonal, C_plus
/// above, C_minus below, exp(-theta) C_minus in the top-right corner and
/// exp(theta) C_plus in the bottom-left (corners merge with the band for
/// k <= 2). Its spectral radius matches C_*(theta/k)'s.
Eigen::MatrixXd block_circulant(const Eigen::MatrixXd& C_minus, const Eigen::MatrixXd& C_zero,
                                const Eigen::MatrixXd& C_plus, double theta, int k);

/// The five s0 x s0 phase-shift components of the diagonal representation,
/// j in [-2, 2].
Eigen::MatrixXd a11_component(const MMRWModel& model, int j, double theta);

/// Homogeneous quintuple-diagonal phase operator of the diagonal
/// representation on a truncated phase window -W..W.
Eigen::MatrixXd a11_operator(const MMRWModel& model, double theta1, int window);

/// sum_j exp(j theta2) a11_component(j, theta1); evaluating it at
/// (theta1 + theta2, theta1) recovers feynman_kac(theta1, theta2) exactly.
Eigen::MatrixXd a11_mgf(const MMRWModel& model, double theta1, double theta2);

}  // namespace mmrw
