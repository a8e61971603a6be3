#include "mmrw/decay.hpp"

#include <cmath>
#include <numeric>

#include "mmrw/spectral.hpp"
#include "scalar_search.hpp"

namespace mmrw {

namespace {

constexpr double kGoldenTol = 1e-10;

void require_positive_direction(int c1, int c2) {
  if (c1 < 1 || c2 < 1)
    throw ModelError("direction must be a pair of positive integers");
}

}  // namespace

DecayResult decay_rate(const MMRWModel& model, int c1, int c2) {
  require_positive_direction(c1, c2);
  require_negative_drift(model);
  const GammaGeometry geo = extreme_points(model);

  // The maximizer of <c, theta> lies on the upper boundary branch between
  // the top point and the right extreme; the objective there is concave.
  const double lo = geo.theta_bar_2[0];
  const double hi = geo.theta_bar_1[0] - 1e-9 * std::max(1.0, std::abs(geo.theta_bar_1[0]));
  auto zeta_upper = [&](double t1, double tol) {
    return zeta2_section(model, t1, tol).zeta_upper;
  };
  auto neg_obj = [&](double t1) { return -(c1 * t1 + c2 * zeta_upper(t1, kGoldenTol)); };

  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - golden * (b - a), x2 = a + golden * (b - a);
  double f1 = neg_obj(x1), f2 = neg_obj(x2);
  while (b - a > kGoldenTol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - golden * (b - a);
      f1 = neg_obj(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + golden * (b - a);
      f2 = neg_obj(x2);
    }
  }
  double t = 0.5 * (a + b);

  DecayResult out;
  out.direction = {c1, c2};
  if (t - lo <= 5.0 * kGoldenTol || hi - t <= 5.0 * kGoldenTol) {
    // Direction parallel to a frontier asymptote: the bracket collapsed onto
    // an endpoint.
    out.flat_segment = true;
    t = (t - lo <= hi - t) ? lo : hi;
  } else {
    // Polish the stationarity condition c1 + c2 * zeta'(t) = 0 with tighter
    // section solves; the golden-section answer alone carries the section
    // tolerance into the argmax.
    const double h = 1e-4;
    for (int it = 0; it < 3; ++it) {
      const double zp = zeta_upper(t + h, 1e-12);
      const double zm = zeta_upper(t - h, 1e-12);
      const double zc = zeta_upper(t, 1e-12);
      const double d1 = c1 + c2 * (zp - zm) / (2.0 * h);
      const double d2 = c2 * (zp - 2.0 * zc + zm) / (h * h);
      if (!(d2 < 0.0)) break;
      const double tn = t - d1 / d2;
      if (tn <= lo || tn >= hi) break;
      t = tn;
    }
  }

  const double z = zeta_upper(t, 1e-12);
  out.argmax = {t, z};
  out.rate = c1 * t + c2 * z;
  return out;
}

double marginal_decay_rate(const MMRWModel& model, int c1, int c2) {
  require_positive_direction(c1, c2);
  if (std::gcd(c1, c2) != 1)
    throw ModelError("marginal decay direction must be coprime");
  require_negative_drift(model);

  const double cap = 50.0 / std::max(c1, c2);
  auto g = [&](double t) { return chi(model, c1 * t, c2 * t) - 1.0; };

  // Locate a point of the ray strictly inside the level set; the origin
  // itself sits on the boundary.
  double inside = 0.0;
  bool found = false;
  for (double t = 1e-4; t <= cap; t *= 2.0) {
    if (g(t) < 0.0) {
      inside = t;
      found = true;
      break;
    }
  }
  if (!found) {
    // The positive ray never enters: the supremum is attained at the origin.
    for (double t = 1e-4; t <= cap; t *= 2.0)
      if (g(-t) < 0.0) return 0.0;
    throw NumericError("ray does not intersect the chi < 1 set");
  }
  const double hi = detail::expand_until_positive(g, inside, inside, cap);
  const double t_star = detail::root_between(g, inside, hi, 1e-12);
  return std::min(c1, c2) * t_star;
}

bool domain_contains(const MMRWModel& model, const GammaGeometry& geo, double theta1,
                     double theta2) {
  const double tol = 1e-10;
  if (!(theta1 < geo.theta_bar_1[0] - tol)) return false;
  if (theta1 <= geo.theta_bar_2[0]) return theta2 < geo.theta_bar_2[1] - tol;
  return theta2 < zeta2_section(model, theta1).zeta_upper - tol;
}

bool domain_contains(const MMRWModel& model, double theta1, double theta2) {
  return domain_contains(model, extreme_points(model), theta1, theta2);
}

double qbd_stationary_lower_bound(const MMRWModel& model, int c1, int c2) {
  return -decay_rate(model, c1, c2).rate;
}

}  // namespace mmrw
