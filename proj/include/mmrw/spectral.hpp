#pragma once

#include <array>

#include <Eigen/Dense>

#include "mmrw/model.hpp"

namespace mmrw {

struct PerronOptions {
  double tol = 1e-13;        // relative tolerance on successive root estimates
  double residual_tol = 1e-12;
  long max_iter = 100000;
  double shift_factor = 1e-3;  // diagonal shift, relative to the max row sum
};

struct PerronResult {
  double root = 0;
  Eigen::VectorXd left;   // scaled so that left . right = 1
  Eigen::VectorXd right;  // l1-normalized
  long iterations = 0;
};

/// A(theta1,theta2) = sum_{i,j} exp(i theta1 + j theta2) A(i,j).
/// Throws NumericError when the exponent range would overflow.
Eigen::MatrixXd feynman_kac(const MMRWModel& model, double theta1, double theta2);

/// axis == 1: sum_k exp(k theta) A(k, idx);  axis == 2: sum_k exp(k theta) A(idx, k).
Eigen::MatrixXd marginal_operator(const MMRWModel& model, int axis, double theta, int idx);

/// Perron root and positive left/right eigenvectors of a nonnegative matrix,
/// by power iteration on the shifted matrix M + delta I. The caller asserts
/// irreducibility; reducible inputs still yield the spectral radius but the
/// eigenvectors need not be positive.
PerronResult perron_root(const Eigen::MatrixXd& M, const PerronOptions& opts = {});

/// Spectral radius of a nonnegative matrix (0 for the zero matrix).
double spectral_radius(const Eigen::MatrixXd& M, const PerronOptions& opts = {});

struct OperatorEvaluation {
  std::array<double, 2> theta{};
  Eigen::MatrixXd matrix;
  double perron_root = 0;
  Eigen::VectorXd left, right;
};

OperatorEvaluation evaluate_operator(const MMRWModel& model, double theta1, double theta2);

/// chi(theta) = spectral radius of the operator above; equals 1 at the origin.
double chi(const MMRWModel& model, double theta1, double theta2);

}  // namespace mmrw
