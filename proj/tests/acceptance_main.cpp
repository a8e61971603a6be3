// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "mmrw/decay.hpp"
#include "mmrw/gamma.hpp"
#include "mmrw/occupation.hpp"
#include "mmrw/qbd.hpp"
#include "mmrw/spectral.hpp"

using namespace mmrw;

namespace {

const double kLn3 = std::log(3.0);
const double kThetaBar1 = std::log(2.0 + std::sqrt(3.0));  // 1.3169578969248166
const double kDiagRate = 2.0 * kLn3;                       // 2.1972245773362196

struct Check {
  bool ok = true;
  std::ostringstream detail;

  template <typename T>
  Check& note(const std::string& k, const T& v) {
    detail << " " << k << "=" << v;
    return *this;
  }
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " FAILED[" << what << "]";
    }
  }
};

// 1. Analytic extreme points of R1.
void criterion1(Check& c) {
  const GammaGeometry geo = extreme_points(fixtures::r1());
  const double e1 = std::abs(geo.theta_bar_1[0] - kThetaBar1);
  const double e2 = std::abs(geo.theta_bar_1[1] - 0.5 * kLn3);
  c.note("theta_bar_1", geo.theta_bar_1[0]).note("err1", e1).note("err2", e2);
  c.require(e1 <= 1e-8, "theta1 extreme within 1e-8");
  c.require(e2 <= 1e-8, "theta2 coordinate within 1e-8");
}

// 2. Analytic decay rate along the diagonal.
void criterion2(Check& c) {
  const DecayResult res = decay_rate(fixtures::r1(), 1, 1);
  c.note("rate", res.rate).note("argmax1", res.argmax[0]).note("argmax2", res.argmax[1]);
  c.require(std::abs(res.rate - kDiagRate) <= 1e-8, "rate = 2 ln 3 within 1e-8");
  c.require(std::abs(res.argmax[0] - kLn3) <= 1e-6, "argmax theta1 within 1e-6");
  c.require(std::abs(res.argmax[1] - kLn3) <= 1e-6, "argmax theta2 within 1e-6");
}

// 3. Spectral identities of the c-expansion and the block wrap.
void criterion3(Check& c) {
  fixtures::Uniform uni(314159);
  double worst_expand = 0.0;
  for (const MMRWModel& m : {fixtures::r1(), fixtures::r2()}) {
    for (auto [c1, c2] : {std::pair{1, 2}, std::pair{2, 1}, std::pair{2, 3}}) {
      const ExpandedModel ex = c_expand(m, c1, c2);
      for (int it = 0; it < 20; ++it) {
        const double t1 = uni(-1, 1), t2 = uni(-1, 1);
        const double lhs = chi(m, t1, t2);
        const double rhs = spectral_radius(feynman_kac(ex.expanded, c1 * t1, c2 * t2));
        worst_expand = std::max(worst_expand, std::abs(lhs - rhs));
      }
    }
  }
  c.note("expand_dev", worst_expand);
  c.require(worst_expand <= 1e-8, "expanded spectral identity within 1e-8");

  double worst_wrap = 0.0;
  Eigen::MatrixXd cm(1, 1), c0(1, 1), cp(1, 1);
  cm << 0.3;
  c0 << 0.2;
  cp << 0.1;
  Eigen::MatrixXd Bm(2, 2), B0(2, 2), Bp(2, 2);
  Bm << 0.1, 0.2, 0.05, 0.15;
  B0 << 0.2, 0.1, 0.1, 0.3;
  Bp << 0.05, 0.1, 0.2, 0.02;
  for (double theta : {-0.7, 0.0, 0.4}) {
    const double direct1 = 0.2 + 0.3 * std::exp(-theta) + 0.1 * std::exp(theta);
    const double direct2 =
        spectral_radius(std::exp(-theta) * Bm + B0 + std::exp(theta) * Bp);
    for (int k : {2, 3, 5}) {
      worst_wrap = std::max(
          worst_wrap,
          std::abs(spectral_radius(block_circulant(cm, c0, cp, k * theta, k)) - direct1));
      worst_wrap = std::max(
          worst_wrap,
          std::abs(spectral_radius(block_circulant(Bm, B0, Bp, k * theta, k)) - direct2));
    }
  }
  c.note("wrap_dev", worst_wrap);
  c.require(worst_wrap <= 1e-8, "block-wrap spectral identity within 1e-8");
}

// 4. Exact degenerate occupation by solver and simulator.
void criterion4(Check& c) {
  const OccupationTable t = truncated_fundamental(fixtures::r0(), {2, 3, 0}, 8);
  bool oracle_exact = t.total() == 3.0 && t.value(2, 3, 0) == 1.0 && t.value(1, 2, 0) == 1.0 &&
                      t.value(0, 1, 0) == 1.0;
  const SimulationEstimate est = simulate_occupation(fixtures::r0(), {2, 3, 0}, 1000, 11, 8, 4);
  bool sim_exact = est.mean.sum() == 3.0 && est.mean_at(2, 3, 0) == 1.0 &&
                   est.mean_at(1, 2, 0) == 1.0 && est.mean_at(0, 1, 0) == 1.0 &&
                   est.half_width.maxCoeff() == 0.0;
  c.note("oracle_total", t.total()).note("sim_total", est.mean.sum());
  c.require(oracle_exact, "solver visits exactly once per diagonal state");
  c.require(sim_exact, "simulator exact with zero variance");
}

// 5. Oracle-simulator agreement at scale.
void criterion5(Check& c) {
  const MMRWModel r1 = fixtures::r1();
  const int L = 64;
  const OccupationTable oracle = truncated_fundamental(r1, {0, 0, 0}, L);
  const SimulationEstimate est = simulate_occupation(r1, {0, 0, 0}, 1000000, 20240901, L, 4);
  int checked = 0, misses = 0;
  for (int x1 = 0; x1 <= L; ++x1)
    for (int x2 = 0; x2 <= L; ++x2) {
      const double q = oracle.value(x1, x2, 0);
      if (q < 1e-3) continue;
      ++checked;
      if (std::abs(est.mean_at(x1, x2, 0) - q) >
          3.0 * std::max(est.half_width_at(x1, x2, 0), 1e-12))
        ++misses;
    }
  c.note("states", checked).note("misses", misses);
  c.require(checked > 0 && misses == 0, "every resolved state within 3 half-widths");
}

// 6. Desk-scale directional limits with monotone truncation refinement.
void criterion6(Check& c) {
  const MMRWModel r1 = fixtures::r1();
  double prev_diag = -1.0, prev_ax1 = -1.0, prev_ax2 = -1.0;
  double diag64 = 0.0, ax1_64 = 0.0, ax2_64 = 0.0;
  for (int L : {48, 64, 96}) {
    const OccupationTable t = truncated_fundamental(r1, {0, 0, 0}, L);
    const double diag = std::abs(empirical_decay(t, {1, 1}, 0, 6, 12).tail() - kDiagRate);
    const double ax1 = std::abs(empirical_decay(t, {1, 0}, 0, 6, 24).tail() - kThetaBar1);
    const double ax2 = std::abs(empirical_decay(t, {0, 1}, 0, 6, 24).tail() - kThetaBar1);
    if (prev_diag >= 0.0) {
      c.require(diag <= prev_diag + 1e-9, "diagonal refinement monotone toward the limit");
      c.require(ax1 <= prev_ax1 + 1e-9, "axis refinement monotone toward the limit");
      c.require(ax2 <= prev_ax2 + 1e-9, "axis refinement monotone toward the limit");
    }
    prev_diag = diag;
    prev_ax1 = ax1;
    prev_ax2 = ax2;
    if (L == 64) {
      diag64 = diag;
      ax1_64 = ax1;
      ax2_64 = ax2;
    }
  }
  c.note("diag_gap", diag64).note("axis1_gap", ax1_64).note("axis2_gap", ax2_64);
  c.require(diag64 <= 0.1, "diagonal tail ratio within 0.1 of 2 ln 3");
  c.require(ax1_64 <= 0.1, "x1-axis tail ratio within 0.1 of the frontier value");
  c.require(ax2_64 <= 0.1, "x2-axis tail ratio within 0.1 of the frontier value");
}

// 7. Matrix-geometric identity against the occupation oracle.
void criterion7(Check& c) {
  const double dev = matrix_geometric_check(fixtures::r1(), QbdAlpha::One, 30, 3);
  c.note("deviation", dev);
  c.require(dev <= 1e-6, "N00 R^k matches the oracle within 1e-6");
}

// 8. Convergence-parameter refinement of the truncated rate matrices.
void criterion8(Check& c) {
  const MMRWModel r1 = fixtures::r1();
  double prev_gap = -1.0, est40 = 0.0;
  for (int K : {10, 20, 40}) {
    const double logcp =
        std::log(cp_estimate(solve_rate_matrix(build_qbd(r1, QbdAlpha::One, K))));
    // Killing-truncated rate matrices approach the limit from above, so the
    // refinement curve decreases toward the frontier value.
    c.require(logcp >= kThetaBar1 - 1e-6, "estimate bounded by the frontier value");
    const double gap = std::abs(logcp - kThetaBar1);
    if (prev_gap >= 0.0) c.require(gap <= prev_gap + 1e-6, "monotone toward the limit");
    prev_gap = gap;
    if (K == 40) est40 = logcp;
  }
  c.note("log_cp_K40", est40);
  c.require(std::abs(est40 - kThetaBar1) <= 0.05, "within 0.05 at K=40");

  const double diag =
      std::log(cp_estimate(solve_rate_matrix(build_qbd(r1, QbdAlpha::DiagOneOne, 40))));
  c.note("log_cp_diag_K40", diag);
  c.require(diag <= kDiagRate + 0.05, "diagonal estimate respects the frontier bound");
}

// 9. Property suites.
void criterion9(Check& c) {
  // chi(0,0) = 1 for every model
  double worst_origin = 0.0;
  std::vector<MMRWModel> models = {fixtures::r0(), fixtures::r1(), fixtures::r2()};
  for (std::uint64_t s = 60; s < 65; ++s)
    models.push_back(fixtures::random_model(1 + static_cast<int>(s % 4), s));
  for (const MMRWModel& m : models)
    worst_origin = std::max(worst_origin, std::abs(chi(m, 0, 0) - 1.0));
  c.note("origin_dev", worst_origin);
  c.require(worst_origin <= 1e-12, "chi(0,0) = 1 within 1e-12");

  // midpoint log-convexity, 200 samples
  fixtures::Uniform uni(8675309);
  bool convex_ok = true;
  const MMRWModel conv_models[] = {fixtures::r1(), fixtures::r2(),
                                   fixtures::random_model(3, 1234)};
  for (const MMRWModel& m : conv_models) {
    for (int it = 0; it < 200; ++it) {
      const double a1 = uni(-2, 2), a2 = uni(-2, 2);
      const double b1 = uni(-2, 2), b2 = uni(-2, 2);
      const double mid = chi(m, 0.5 * (a1 + b1), 0.5 * (a2 + b2));
      if (mid * mid > chi(m, a1, a2) * chi(m, b1, b2) * (1.0 + 1e-10)) convex_ok = false;
    }
  }
  c.require(convex_ok, "midpoint log-convexity with slack 1e-10");

  // diagonal-representation shift identity
  double worst_shift = 0.0;
  for (const MMRWModel& m : conv_models) {
    for (int it = 0; it < 20; ++it) {
      const double t1 = uni(-1, 1), t2 = uni(-1, 1);
      worst_shift = std::max(worst_shift, (a11_mgf(m, t1 + t2, t1) - feynman_kac(m, t1, t2))
                                              .cwiseAbs()
                                              .maxCoeff());
    }
  }
  c.note("shift_dev", worst_shift);
  c.require(worst_shift <= 1e-12, "shift identity to 1e-12");

  // functional-equation residual deep inside the domain
  const double res = functional_equation_residual(fixtures::r1(), 0, 0, {-0.5, -0.5}, 40);
  c.note("residual", res);
  c.require(res <= 1e-8, "functional-equation residual <= 1e-8");

  // one-sided bound: no ray term may exceed the partial mgf
  const MMRWModel r1 = fixtures::r1();
  const int L = 40;
  const OccupationTableSet set = occupation_tables(r1, 0, 0, L);
  int violations = 0;
  for (std::array<double, 2> theta :
       {std::array{0.3, 0.3}, {0.5, 0.5}, {kThetaBar1 - 0.06, 0.0}, {0.0, kThetaBar1 - 0.06}}) {
    const Eigen::MatrixXd M = mgf_partial(set, theta);
    for (auto [c1, c2] : {std::pair{1, 1}, std::pair{1, 2}, std::pair{2, 1}}) {
      for (int k = 0; k * std::max(c1, c2) <= L / 2; ++k) {
        const double term = std::exp(k * (theta[0] * c1 + theta[1] * c2)) *
                            set.rows[0].value(k * c1, k * c2, 0);
        if (term > M(0, 0) * (1.0 + 1e-9)) ++violations;
      }
    }
  }
  c.note("bound_violations", violations);
  c.require(violations == 0, "no sampled pair violates the one-sided bound");
}

// 10. Domain frontier offsets and the truncation refinement probes.
void criterion10(Check& c) {
  const MMRWModel r1 = fixtures::r1();
  const GammaGeometry geo = extreme_points(r1);
  const double eps = 1e-4;
  int inside_fail = 0, outside_fail = 0;
  for (int k = 0; k < 50; ++k) {
    const double lo = geo.theta_bar_2[0] - 0.8;
    const double hi = geo.theta_bar_1[0] - 2e-4;
    const double t1 = lo + (hi - lo) * k / 49.0;
    const double front = t1 <= geo.theta_bar_2[0] ? geo.theta_bar_2[1]
                                                  : zeta2_section(r1, t1).zeta_upper;
    if (!domain_contains(r1, geo, t1 - eps, front - eps)) ++inside_fail;
    if (domain_contains(r1, geo, t1 + eps, front + eps)) ++outside_fail;
  }
  c.note("inside_fail", inside_fail).note("outside_fail", outside_fail);
  c.require(inside_fail == 0, "inside offsets of 50 frontier points accepted");
  c.require(outside_fail == 0, "outside offsets of 50 frontier points rejected");

  const OccupationTableSet s40 = occupation_tables(r1, 0, 0, 40);
  const OccupationTableSet s60 = occupation_tables(r1, 0, 0, 60);
  double worst_inside = 0.0;
  for (std::array<double, 2> theta :
       {std::array{0.0, 0.0}, {0.5, 0.5}, {kThetaBar1 - 0.06, 0.0}, {0.0, kThetaBar1 - 0.06}}) {
    const double a = mgf_partial(s40, theta)(0, 0), b = mgf_partial(s60, theta)(0, 0);
    worst_inside = std::max(worst_inside, std::abs(b - a) / a);
  }
  double worst_outside = 10.0;
  for (std::array<double, 2> theta :
       {std::array{kLn3 + 0.05, kLn3 + 0.05}, {kThetaBar1 + 0.06, 0.2},
        {0.2, kThetaBar1 + 0.06}}) {
    const double a = mgf_partial(s40, theta)(0, 0), b = mgf_partial(s60, theta)(0, 0);
    worst_outside = std::min(worst_outside, b / a);
  }
  c.note("inside_rel", worst_inside).note("outside_ratio", worst_outside);
  c.require(worst_inside <= 0.01, "inside probes refine within 1%");
  c.require(worst_outside >= 1.5, "outside probes grow by at least 1.5x");
}

}  // namespace

int main() {
  struct Entry {
    int id;
    std::string label;
    std::function<void(Check&)> fn;
    double time_limit;  // seconds; 0 = none
  };
  const std::vector<Entry> entries = {
      {1, "analytic extreme points", criterion1, 1.0},
      {2, "analytic diagonal decay rate", criterion2, 1.0},
      {3, "re-blocking spectral identities", criterion3, 5.0},
      {4, "exact degenerate occupation", criterion4, 0.0},
      {5, "oracle-simulator agreement (1e6 paths)", criterion5, 60.0},
      {6, "desk-scale directional limits", criterion6, 30.0},
      {7, "matrix-geometric identity", criterion7, 0.0},
      {8, "convergence-parameter refinement", criterion8, 0.0},
      {9, "property suites", criterion9, 0.0},
      {10, "domain frontier and refinement probes", criterion10, 0.0},
  };

  int failures = 0;
  for (const Entry& e : entries) {
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      e.fn(check);
    } catch (const std::exception& ex) {
      check.ok = false;
      check.detail << " EXCEPTION[" << ex.what() << "]";
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (e.time_limit > 0.0 && secs > e.time_limit) {
      check.ok = false;
      check.detail << " FAILED[runtime " << secs << "s > " << e.time_limit << "s]";
    }
    if (!check.ok) ++failures;
    std::printf("%s criterion %2d: %s |%s | %.2fs\n", check.ok ? "PASS" : "FAIL", e.id,
                e.label.c_str(), check.detail.str().c_str(), secs);
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
