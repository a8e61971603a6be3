#pragma once

#include <array>

#include "mmrw/gamma.hpp"
#include "mmrw/model.hpp"

namespace mmrw {

/// Support value of the chi <= 1 level set in an integer direction c > 0:
/// rate = sup <c, theta> over the set, attained at argmax on its boundary.
/// The occupation measure along the ray k*c then decays like exp(-rate * k).
struct DecayResult {
  std::array<int, 2> direction{};
  double rate = 0;
  std::array<double, 2> argmax{};
  bool flat_segment = false;  // maximizer collapsed onto an interval endpoint
};

DecayResult decay_rate(const MMRWModel& model, int c1, int c2);

/// Decay rate of level sums along lines c1*x1 + c2*x2 = c1*k (coprime c,
/// c1 <= c2; symmetric form otherwise): min(c1,c2) times the ray crossing
/// parameter of chi = 1.
double marginal_decay_rate(const MMRWModel& model, int c1, int c2);

/// Membership in the convergence domain (the down-set of the chi < 1 set),
/// via its north-east frontier: theta1 < theta_bar_1 and theta2 below the
/// horizontal frontier left of theta_bar_2's abscissa, below the upper
/// boundary branch right of it.
bool domain_contains(const MMRWModel& model, double theta1, double theta2);
bool domain_contains(const MMRWModel& model, const GammaGeometry& geo, double theta1,
                     double theta2);

/// Lower bound for the stationary-distribution decay rate of the reflected
/// process with the same interior blocks: minus decay_rate(model, c).rate.
double qbd_stationary_lower_bound(const MMRWModel& model, int c1, int c2);

}  // namespace mmrw
