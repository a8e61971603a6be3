#pragma once

#include <array>
#include <vector>

#include "mmrw/model.hpp"

namespace mmrw {

/// Extreme points of the convex level set { theta : chi(theta) <= 1 }.
/// Coordinates are finite for every model with bounded level set; each
/// stored point satisfies chi = 1 within 10 * tol.
struct GammaGeometry {
  std::array<double, 2> theta_bar_1{};   // arg max theta1
  std::array<double, 2> theta_bar_2{};   // arg max theta2
  std::array<double, 2> theta_bar_11{};  // arg max theta1 + theta2
  std::array<double, 2> theta_under_1{};  // arg min theta1
  std::array<double, 2> theta_under_2{};  // arg min theta2
  double tol = 1e-8;
  bool flat_segment = false;  // an inner minimizer interval was wider than tol
};

/// The two theta2-solutions of chi(theta1, .) = 1 at a fixed theta1.
struct BoundarySection {
  double theta1 = 0;
  double zeta_lower = 0;
  double zeta_upper = 0;
};

/// Strict membership: chi(theta) < 1 - tol_strict.
bool gamma_contains(const MMRWModel& model, double theta1, double theta2,
                    double tol_strict = 1e-12);

/// Both roots of chi(theta1, .) = 1, to tolerance tol in theta2. A tangency
/// (section minimum at 1 within tolerance) collapses to a double root at the
/// minimizer; a section minimum above 1 throws NumericError("no two real
/// solutions ...").
BoundarySection zeta2_section(const MMRWModel& model, double theta1, double tol = 1e-10);

/// Extreme points found by bisection on the section minima; requires
/// negative drift in at least one coordinate, and throws NumericError when
/// the level set is unbounded (bracket cap |theta| = 50).
GammaGeometry extreme_points(const MMRWModel& model);

/// n_points boundary sections on a uniform theta1 grid over the open
/// interval between the theta1 extremes (inset by 1e-6). Every returned
/// branch point satisfies |chi - 1| <= 1e-8.
std::vector<BoundarySection> trace_boundary(const MMRWModel& model, int n_points);

}  // namespace mmrw
