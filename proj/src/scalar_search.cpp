#include "scalar_search.hpp"

#include <cmath>
#include <sstream>

#include "mmrw/model.hpp"

namespace mmrw::detail {

namespace {
const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;
}

MinResult minimize_convex(const std::function<double(double)>& f, double x0, double cap,
                          double xtol) {
  double a = x0 - 1.0, m = x0, b = x0 + 1.0;
  double fa = f(a), fm = f(m), fb = f(b);
  while (fb <= fm) {
    a = m;
    fa = fm;
    m = b;
    fm = fb;
    b = m + 2.0 * (b - a);
    if (std::abs(b) > cap)
      throw NumericError("search bracket exceeded the cap; level set looks unbounded");
    fb = f(b);
  }
  while (fa <= fm) {
    b = m;
    fb = fm;
    m = a;
    fm = fa;
    a = m - 2.0 * (b - a);
    if (std::abs(a) > cap)
      throw NumericError("search bracket exceeded the cap; level set looks unbounded");
    fa = f(a);
  }

  double lo = a, hi = b;
  double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > xtol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = f(x2);
    }
  }

  MinResult out;
  out.x = 0.5 * (lo + hi);
  out.fx = f(out.x);

  // Newton polish on the central-difference derivative; the golden-section
  // answer is kept if the polish does not improve.
  const double h = 1e-5 * std::max(1.0, std::abs(out.x));
  double x = out.x;
  for (int it = 0; it < 3; ++it) {
    const double fp = f(x + h), fmn = f(x - h), fc = f(x);
    const double d1 = (fp - fmn) / (2.0 * h);
    const double d2 = (fp - 2.0 * fc + fmn) / (h * h);
    if (!(d2 > 0.0)) break;
    double xn = x - d1 / d2;
    if (xn < a || xn > b) break;
    x = xn;
  }
  const double fx = f(x);
  if (fx <= out.fx) {
    out.x = x;
    out.fx = fx;
  }

  // Flat-bottom diagnostic: if the function is indistinguishable from the
  // minimum well outside the tolerance window, report the flat midpoint.
  const double probe = std::max(1e-3, 1e3 * xtol);
  const double eps = 1e-12 * std::max(1.0, std::abs(out.fx));
  if (f(out.x - probe) <= out.fx + eps && f(out.x + probe) <= out.fx + eps) {
    double left = out.x - probe, right = out.x + probe;
    double w = probe;
    while (f(left - w) <= out.fx + eps) {
      left -= w;
      w *= 2.0;
      if (std::abs(left) > cap)
        throw NumericError("flat segment extends past the cap; level set looks unbounded");
    }
    w = probe;
    while (f(right + w) <= out.fx + eps) {
      right += w;
      w *= 2.0;
      if (std::abs(right) > cap)
        throw NumericError("flat segment extends past the cap; level set looks unbounded");
    }
    out.x = 0.5 * (left + right);
    out.fx = f(out.x);
    out.flat = true;
  }
  return out;
}

double root_between(const std::function<double(double)>& f, double a, double b, double xtol) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    std::ostringstream os;
    os << "root_between: no sign change on [" << a << ", " << b << "]";
    throw NumericError(os.str());
  }
  while (std::abs(b - a) > xtol) {
    const double m = 0.5 * (a + b);
    const double fmv = f(m);
    if (fmv == 0.0) return m;
    if ((fmv > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fmv;
    } else {
      b = m;
      fb = fmv;
    }
  }
  return 0.5 * (a + b);
}

double expand_until_positive(const std::function<double(double)>& f, double from, double step,
                             double cap) {
  double t = from + step;
  while (true) {
    if (std::abs(t) > cap)
      throw NumericError("search bracket exceeded the cap; level set looks unbounded");
    if (f(t) > 0.0) return t;
    step *= 2.0;
    t += step;
  }
}

}  // namespace mmrw::detail
