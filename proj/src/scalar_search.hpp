#pragma once

#include <functional>

namespace mmrw::detail {

struct MinResult {
  double x = 0;
  double fx = 0;
  bool flat = false;
};

/// Minimize a convex scalar function: expanding bracket around x0, golden
/// section to xtol, then a few central-difference Newton polish steps.
/// Throws NumericError when the bracket would exceed |x| = cap (the level
/// set is unbounded in that direction).
MinResult minimize_convex(const std::function<double(double)>& f, double x0, double cap,
                          double xtol);

/// Root of f between a and b (f(a) and f(b) of opposite sign, either
/// orientation), bisected until the interval is shorter than xtol.
double root_between(const std::function<double(double)>& f, double a, double b, double xtol);

/// First t >= from (stepping and doubling `step`) with f(t) > 0; throws
/// NumericError past the cap. Used to bracket boundary crossings.
double expand_until_positive(const std::function<double(double)>& f, double from, double step,
                             double cap);

}  // namespace mmrw::detail
