#include "mmrw/spectral.hpp"

#include <cmath>
#include <sstream>

namespace mmrw {

namespace {
constexpr double kExpGuard = 700.0;  // exp(709) is already near DBL_MAX
}

Eigen::MatrixXd feynman_kac(const MMRWModel& model, double theta1, double theta2) {
  if (std::abs(theta1) + std::abs(theta2) > kExpGuard)
    throw NumericError("feynman_kac: |theta| beyond exponent range");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(model.s0, model.s0);
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j)
      out += std::exp(i * theta1 + j * theta2) * model.block(i, j);
  return out;
}

Eigen::MatrixXd marginal_operator(const MMRWModel& model, int axis, double theta, int idx) {
  if (axis != 1 && axis != 2) throw ModelError("marginal_operator: axis must be 1 or 2");
  if (idx < -1 || idx > 1) throw ModelError("marginal_operator: index must be -1, 0 or 1");
  if (std::abs(theta) > kExpGuard)
    throw NumericError("marginal_operator: |theta| beyond exponent range");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(model.s0, model.s0);
  for (int k = -1; k <= 1; ++k) {
    const Eigen::MatrixXd& b = axis == 1 ? model.block(k, idx) : model.block(idx, k);
    out += std::exp(k * theta) * b;
  }
  return out;
}

namespace {

// Power iteration on B = M + delta I from a positive start vector. Returns
// the l1-normalized iterate once both the root estimate and the eigenvector
// residual have settled.
std::pair<Eigen::VectorXd, long> power_iterate(const Eigen::MatrixXd& B, double delta,
                                               const PerronOptions& opts) {
  const Eigen::Index n = B.rows();
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  double lambda = 0.0;
  for (long it = 1; it <= opts.max_iter; ++it) {
    Eigen::VectorXd w = B * v;
    const double norm = w.sum();  // w >= 0
    if (!(norm > 0.0)) throw NumericError("perron_root: iterate vanished");
    w /= norm;
    const double diff = std::abs(norm - lambda);
    lambda = norm;
    const double res = (B * w - lambda * w).cwiseAbs().maxCoeff();
    v.swap(w);
    if (diff <= opts.tol * lambda && res <= opts.residual_tol * lambda)
      return {v, it};
  }
  std::ostringstream os;
  os << "perron_root: no convergence after " << opts.max_iter
     << " iterations (root ~ " << lambda - delta << ")";
  throw NumericError(os.str());
}

}  // namespace

PerronResult perron_root(const Eigen::MatrixXd& M, const PerronOptions& opts) {
  if (M.rows() != M.cols() || M.rows() == 0)
    throw ModelError("perron_root: matrix must be square and nonempty");
  if (M.minCoeff() < 0.0) throw ModelError("perron_root: matrix must be nonnegative");
  const double max_row_sum = M.rowwise().sum().maxCoeff();
  if (max_row_sum == 0.0) throw NumericError("perron_root: zero matrix");
  const double delta = opts.shift_factor * max_row_sum;
  const Eigen::MatrixXd B =
      M + delta * Eigen::MatrixXd::Identity(M.rows(), M.cols());

  PerronResult out;
  auto [right, it_r] = power_iterate(B, delta, opts);
  auto [left, it_l] = power_iterate(B.transpose(), delta, opts);
  out.iterations = it_r + it_l;
  // One Rayleigh refinement on the unshifted matrix; second-order accurate in
  // the eigenvector error.
  const double denom = left.dot(right);
  if (!(denom > 0.0)) throw NumericError("perron_root: degenerate eigenvector pairing");
  out.root = left.dot(M * right) / denom;
  out.right = right;
  out.left = left / denom;
  return out;
}

double spectral_radius(const Eigen::MatrixXd& M, const PerronOptions& opts) {
  if (M.rows() == 0 || M.rowwise().sum().maxCoeff() == 0.0) return 0.0;
  return perron_root(M, opts).root;
}

OperatorEvaluation evaluate_operator(const MMRWModel& model, double theta1, double theta2) {
  OperatorEvaluation ev;
  ev.theta = {theta1, theta2};
  ev.matrix = feynman_kac(model, theta1, theta2);
  PerronResult pr = perron_root(ev.matrix);
  ev.perron_root = pr.root;
  ev.left = pr.left;
  ev.right = pr.right;
  return ev;
}

double chi(const MMRWModel& model, double theta1, double theta2) {
  return perron_root(feynman_kac(model, theta1, theta2)).root;
}

}  // namespace mmrw
