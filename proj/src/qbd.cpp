#include "mmrw/qbd.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "mmrw/occupation.hpp"
#include "mmrw/spectral.hpp"

namespace mmrw {

QbdAlpha parse_alpha(const std::string& text) {
  if (text == "1") return QbdAlpha::One;
  if (text == "2") return QbdAlpha::Two;
  if (text == "11" || text == "1,1") return QbdAlpha::DiagOneOne;
  throw ModelError("unknown representation '" + text + "'; use 1, 2 or 11");
}

std::string alpha_name(QbdAlpha alpha) {
  switch (alpha) {
    case QbdAlpha::One: return "1";
    case QbdAlpha::Two: return "2";
    default: return "11";
  }
}

namespace {

// Level change of the diagonal representation for a phase-difference d and
// increments (i, j): min(x1+i, x2+j) - min(x1, x2) with x1 - x2 = d.
int diag_level_change(int d, int i, int j) {
  if (d >= 2) return j;
  if (d == 1) return std::min(1 + i, j);
  if (d == 0) return std::min(i, j);
  if (d == -1) return std::min(i, 1 + j);
  return i;
}

}  // namespace

QbdTriple build_qbd(const MMRWModel& model, QbdAlpha alpha, int K) {
  if (K < 2) throw ModelError("phase truncation K must be at least 2");
  const int s0 = model.s0;
  QbdTriple t;
  t.alpha = alpha;
  t.K = K;
  t.s0 = s0;

  if (alpha == QbdAlpha::One || alpha == QbdAlpha::Two) {
    const int n = (K + 1) * s0;
    for (Eigen::MatrixXd* m : {&t.A_minus, &t.A_zero, &t.A_plus})
      *m = Eigen::MatrixXd::Zero(n, n);
    for (int lev = -1; lev <= 1; ++lev) {
      Eigen::MatrixXd& target = lev < 0 ? t.A_minus : (lev == 0 ? t.A_zero : t.A_plus);
      for (int p = 0; p <= K; ++p)
        for (int dp = -1; dp <= 1; ++dp) {
          const int q = p + dp;
          if (q < 0 || q > K) continue;
          const Eigen::MatrixXd& b =
              alpha == QbdAlpha::One ? model.block(lev, dp) : model.block(dp, lev);
          target.block(p * s0, q * s0, s0, s0) = b;
        }
    }
    return t;
  }

  // Diagonal representation: phases d = x1 - x2 in [-K, K].
  const int n = (2 * K + 1) * s0;
  for (Eigen::MatrixXd* m : {&t.A_minus, &t.A_zero, &t.A_plus})
    *m = Eigen::MatrixXd::Zero(n, n);
  for (int d = -K; d <= K; ++d)
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j) {
        const int dp = d + i - j;
        if (dp < -K || dp > K) continue;  // killed at the phase edge
        const int lev = diag_level_change(d, i, j);
        Eigen::MatrixXd& target = lev < 0 ? t.A_minus : (lev == 0 ? t.A_zero : t.A_plus);
        target.block((d + K) * s0, (dp + K) * s0, s0, s0) += model.block(i, j);
      }
  return t;
}

RateMatrix solve_rate_matrix(const Eigen::MatrixXd& A_minus, const Eigen::MatrixXd& A_zero,
                             const Eigen::MatrixXd& A_plus) {
  const Eigen::Index n = A_zero.rows();
  RateMatrix out;
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
  constexpr long kCap = 1000000;
  for (long it = 1; it <= kCap; ++it) {
    const Eigen::MatrixXd next = A_plus + R * A_zero + R * R * A_minus;
    const double diff = (next - R).cwiseAbs().maxCoeff();
    R = next;
    if (diff <= 1e-14) {
      out.R = std::move(R);
      out.iterations = it;
      out.residual =
          (out.R - (A_plus + out.R * A_zero + out.R * out.R * A_minus)).cwiseAbs().maxCoeff();
      return out;
    }
  }
  throw NumericError("rate-matrix iteration did not converge within the cap");
}

RateMatrix solve_rate_matrix(const QbdTriple& triple) {
  return solve_rate_matrix(triple.A_minus, triple.A_zero, triple.A_plus);
}

double cp_estimate(const RateMatrix& rate) {
  if (rate.R.size() == 0 || rate.R.maxCoeff() == 0.0)
    return std::numeric_limits<double>::infinity();
  return 1.0 / spectral_radius(rate.R);
}

double matrix_geometric_check(const MMRWModel& model, QbdAlpha alpha, int K, int k_max) {
  if (alpha == QbdAlpha::DiagOneOne)
    throw ModelError("matrix-geometric check applies to the axis representations only");
  if (k_max < 0 || k_max > 5) throw ModelError("k_max must be in 0..5");
  const int s0 = model.s0;
  const QbdTriple triple = build_qbd(model, alpha, K);
  const RateMatrix rate = solve_rate_matrix(triple);
  const Eigen::Index n = triple.A_zero.rows();
  const Eigen::MatrixXd N00 =
      (Eigen::MatrixXd::Identity(n, n) - triple.A_zero - rate.R * triple.A_minus)
          .partialPivLu()
          .solve(Eigen::MatrixXd::Identity(n, n));

  const int half = K / 2;
  std::vector<OccupationTable> tables;
  tables.reserve(static_cast<std::size_t>((half + 1) * s0));
  for (int p = 0; p <= half; ++p)
    for (int j = 0; j < s0; ++j) {
      const Origin origin = alpha == QbdAlpha::One ? Origin{0, p, j} : Origin{p, 0, j};
      tables.push_back(truncated_fundamental(model, origin, K));
    }

  double dev = 0.0;
  Eigen::MatrixXd N0k = N00;
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0) N0k = N0k * rate.R;
    for (int p = 0; p <= half; ++p)
      for (int j = 0; j < s0; ++j) {
        const OccupationTable& table = tables[static_cast<std::size_t>(p * s0 + j)];
        for (int q = 0; q <= half; ++q)
          for (int jp = 0; jp < s0; ++jp) {
            const double oracle = alpha == QbdAlpha::One ? table.value(k, q, jp)
                                                         : table.value(q, k, jp);
            dev = std::max(dev, std::abs(N0k(p * s0 + j, q * s0 + jp) - oracle));
          }
      }
  }
  return dev;
}

namespace {

// Places src into dst at block position (r, c) of a k x k block grid.
void put_block(Eigen::MatrixXd& dst, int r, int c, const Eigen::MatrixXd& src) {
  dst.block(r * src.rows(), c * src.cols(), src.rows(), src.cols()) += src;
}

}  // namespace

ExpandedModel c_expand(const MMRWModel& model, int c1, int c2) {
  if (c1 < 1 || c2 < 1) throw ModelError("expansion direction must be positive integers");
  const int s0 = model.s0;

  // Inner re-blocking over the x1 remainder.
  std::array<std::array<Eigen::MatrixXd, 3>, 3> B;  // B[i+1][j+1], size c1*s0
  for (int j = -1; j <= 1; ++j) {
    Eigen::MatrixXd Bm = Eigen::MatrixXd::Zero(c1 * s0, c1 * s0);
    Eigen::MatrixXd B0 = Eigen::MatrixXd::Zero(c1 * s0, c1 * s0);
    Eigen::MatrixXd Bp = Eigen::MatrixXd::Zero(c1 * s0, c1 * s0);
    put_block(Bm, 0, c1 - 1, model.block(-1, j));
    put_block(Bp, c1 - 1, 0, model.block(1, j));
    for (int r = 0; r < c1; ++r) {
      put_block(B0, r, r, model.block(0, j));
      if (r + 1 < c1) put_block(B0, r, r + 1, model.block(1, j));
      if (r - 1 >= 0) put_block(B0, r, r - 1, model.block(-1, j));
    }
    B[0][static_cast<std::size_t>(j + 1)] = std::move(Bm);
    B[1][static_cast<std::size_t>(j + 1)] = std::move(B0);
    B[2][static_cast<std::size_t>(j + 1)] = std::move(Bp);
  }

  // Outer re-blocking over the x2 remainder.
  ExpandedModel out;
  out.base = model;
  out.c = {c1, c2};
  out.expanded = MMRWModel::zeros(c1 * c2 * s0);
  const int bs = c1 * s0;
  for (int i = -1; i <= 1; ++i) {
    const auto& Bi = B[static_cast<std::size_t>(i + 1)];
    Eigen::MatrixXd Am = Eigen::MatrixXd::Zero(c2 * bs, c2 * bs);
    Eigen::MatrixXd A0 = Eigen::MatrixXd::Zero(c2 * bs, c2 * bs);
    Eigen::MatrixXd Ap = Eigen::MatrixXd::Zero(c2 * bs, c2 * bs);
    Am.block(0, (c2 - 1) * bs, bs, bs) += Bi[0];
    Ap.block((c2 - 1) * bs, 0, bs, bs) += Bi[2];
    for (int r = 0; r < c2; ++r) {
      A0.block(r * bs, r * bs, bs, bs) += Bi[1];
      if (r + 1 < c2) A0.block(r * bs, (r + 1) * bs, bs, bs) += Bi[2];
      if (r - 1 >= 0) A0.block(r * bs, (r - 1) * bs, bs, bs) += Bi[0];
    }
    out.expanded.block(i, -1) = std::move(Am);
    out.expanded.block(i, 0) = std::move(A0);
    out.expanded.block(i, 1) = std::move(Ap);
  }
  out.expanded.check();
  return out;
}

Eigen::MatrixXd block_circulant(const Eigen::MatrixXd& C_minus, const Eigen::MatrixXd& C_zero,
                                const Eigen::MatrixXd& C_plus, double theta, int k) {
  if (k < 1) throw ModelError("block_circulant: k must be positive");
  const Eigen::Index m = C_zero.rows();
  if (C_minus.rows() != m || C_minus.cols() != C_zero.cols() || C_plus.rows() != m ||
      C_plus.cols() != C_zero.cols() || C_zero.cols() != m)
    throw ModelError("block_circulant: blocks must be square of equal size");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(k * m, k * m);
  auto add = [&](int r, int c, const Eigen::MatrixXd& b, double scale) {
    out.block(r * m, c * m, m, m) += scale * b;
  };
  for (int r = 0; r < k; ++r) {
    add(r, r, C_zero, 1.0);
    if (r + 1 < k) add(r, r + 1, C_plus, 1.0);
    if (r - 1 >= 0) add(r, r - 1, C_minus, 1.0);
  }
  add(0, k - 1, C_minus, std::exp(-theta));
  add(k - 1, 0, C_plus, std::exp(theta));
  return out;
}

Eigen::MatrixXd a11_component(const MMRWModel& model, int j, double theta) {
  const double ep = std::exp(theta), em = std::exp(-theta);
  switch (j) {
    case -2: return ep * model.block(-1, 1);
    case -1: return model.block(-1, 0) + ep * model.block(0, 1);
    case 0:
      return em * model.block(-1, -1) + model.block(0, 0) + ep * model.block(1, 1);
    case 1: return em * model.block(0, -1) + model.block(1, 0);
    case 2: return em * model.block(1, -1);
    default: throw ModelError("a11 component index must be in -2..2");
  }
}

Eigen::MatrixXd a11_operator(const MMRWModel& model, double theta1, int window) {
  if (window < 2) throw ModelError("a11 window must be at least 2");
  const int s0 = model.s0;
  const int n = (2 * window + 1);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n * s0, n * s0);
  for (int j = -2; j <= 2; ++j) {
    const Eigen::MatrixXd comp = a11_component(model, j, theta1);
    for (int d = 0; d < n; ++d) {
      const int dp = d + j;
      if (dp < 0 || dp >= n) continue;
      out.block(d * s0, dp * s0, s0, s0) += comp;
    }
  }
  return out;
}

Eigen::MatrixXd a11_mgf(const MMRWModel& model, double theta1, double theta2) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(model.s0, model.s0);
  for (int j = -2; j <= 2; ++j) out += std::exp(j * theta2) * a11_component(model, j, theta1);
  return out;
}

}  // namespace mmrw
