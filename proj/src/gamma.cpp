#include "mmrw/gamma.hpp"

#include <cmath>
#include <sstream>

#include "mmrw/spectral.hpp"
#include "scalar_search.hpp"

namespace mmrw {

namespace {

constexpr double kBracketCap = 50.0;
constexpr double kInnerTol = 1e-11;
constexpr double kRootTol = 5e-10;
constexpr double kTangencySlack = 1e-7;

}  // namespace

bool gamma_contains(const MMRWModel& model, double theta1, double theta2, double tol_strict) {
  return chi(model, theta1, theta2) < 1.0 - tol_strict;
}

BoundarySection zeta2_section(const MMRWModel& model, double theta1, double tol) {
  auto f = [&](double t2) { return chi(model, theta1, t2); };
  const detail::MinResult m = detail::minimize_convex(f, 0.0, kBracketCap, kInnerTol);
  if (m.fx > 1.0 + kTangencySlack) {
    std::ostringstream os;
    os << "no two real solutions: min chi(" << theta1 << ", .) = " << m.fx << " > 1";
    throw NumericError(os.str());
  }
  BoundarySection sec;
  sec.theta1 = theta1;
  if (m.fx >= 1.0) {
    // Tangency within tolerance: the bracketed root gap is below resolution,
    // return the inner minimizer as a double root.
    sec.zeta_lower = sec.zeta_upper = m.x;
    return sec;
  }
  auto g = [&](double t2) { return f(t2) - 1.0; };
  const double hi = detail::expand_until_positive(g, m.x, 0.5, kBracketCap);
  sec.zeta_upper = detail::root_between(g, m.x, hi, tol);
  const double lo =
      -detail::expand_until_positive([&](double t) { return g(-t); }, -m.x, 0.5, kBracketCap);
  sec.zeta_lower = detail::root_between(g, lo, m.x, tol);
  return sec;
}

namespace {

struct SectionMin {
  double arg;   // inner minimizer
  double value; // min chi
  bool flat;
};

// min over the free coordinate of chi along a line; dir selects the family:
// 0: theta1 fixed, minimize over theta2
// 1: theta2 fixed, minimize over theta1
// 2: theta1 + theta2 fixed at s, minimize over the difference
SectionMin section_min(const MMRWModel& model, int dir, double fixed) {
  auto f = [&](double t) {
    switch (dir) {
      case 0: return chi(model, fixed, t);
      case 1: return chi(model, t, fixed);
      default: return chi(model, 0.5 * (fixed + t), 0.5 * (fixed - t));
    }
  };
  const detail::MinResult m = detail::minimize_convex(f, 0.0, 2.0 * kBracketCap, kInnerTol);
  return {m.x, m.fx, m.flat};
}

// Root of (min chi along the family) = 1 on the given side of 0. The origin
// always satisfies min chi <= 1, so [0, root] brackets a sign change.
double frontier_root(const MMRWModel& model, int dir, double side, bool* flat_seen) {
  auto g = [&](double v) {
    const SectionMin sm = section_min(model, dir, v);
    if (flat_seen != nullptr && sm.flat) *flat_seen = true;
    return sm.value - 1.0;
  };
  const double cap = dir == 2 ? 2.0 * kBracketCap : kBracketCap;
  double lo = 0.0;
  if (!(g(lo) < -1e-12)) {
    // The section minimum at the origin evaluates to 1 up to eigensolver
    // noise (the inner minimizer coincides with the origin when the
    // transverse drift vanishes). Step inside to get a strict sign.
    bool found = false;
    for (double step : {1e-6, 1e-4, 1e-2}) {
      const double probe = side * step;
      if (g(probe) < -1e-12) {
        lo = probe;
        found = true;
        break;
      }
    }
    if (!found) return 0.0;  // the level set does not extend in this direction
  }
  double hi = side;
  while (g(hi) <= 0.0) {
    hi *= 2.0;
    if (std::abs(hi) > cap)
      throw NumericError("level-set frontier not found within |theta| = 50; set looks unbounded");
  }
  return detail::root_between(g, lo, hi, kRootTol);
}

}  // namespace

GammaGeometry extreme_points(const MMRWModel& model) {
  require_negative_drift(model);
  GammaGeometry geo;
  bool flat = false;

  const double t1_max = frontier_root(model, 0, 1.0, &flat);
  geo.theta_bar_1 = {t1_max, section_min(model, 0, t1_max).arg};
  const double t1_min = frontier_root(model, 0, -1.0, &flat);
  geo.theta_under_1 = {t1_min, section_min(model, 0, t1_min).arg};

  const double t2_max = frontier_root(model, 1, 1.0, &flat);
  geo.theta_bar_2 = {section_min(model, 1, t2_max).arg, t2_max};
  const double t2_min = frontier_root(model, 1, -1.0, &flat);
  geo.theta_under_2 = {section_min(model, 1, t2_min).arg, t2_min};

  const double s_max = frontier_root(model, 2, 1.0, &flat);
  const double diff = section_min(model, 2, s_max).arg;
  geo.theta_bar_11 = {0.5 * (s_max + diff), 0.5 * (s_max - diff)};

  geo.tol = 1e-8;
  geo.flat_segment = flat;
  return geo;
}

std::vector<BoundarySection> trace_boundary(const MMRWModel& model, int n_points) {
  if (n_points < 2) throw ModelError("trace_boundary: n_points must be at least 2");
  const GammaGeometry geo = extreme_points(model);
  const double eps = 1e-6;
  const double lo = geo.theta_under_1[0] + eps;
  const double hi = geo.theta_bar_1[0] - eps;
  std::vector<BoundarySection> out;
  out.reserve(static_cast<std::size_t>(n_points));
  for (int k = 0; k < n_points; ++k) {
    const double t1 = lo + (hi - lo) * static_cast<double>(k) / (n_points - 1);
    out.push_back(zeta2_section(model, t1));
  }
  return out;
}

}  // namespace mmrw
