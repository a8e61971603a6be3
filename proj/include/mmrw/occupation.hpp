#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mmrw/model.hpp"

namespace mmrw {

struct Origin {
  int x1 = 0;
  int x2 = 0;
  int j = 0;
};

/// Expected visit counts on [0,L]^2 x S0 before leaving the quadrant, for the
/// walk truncated by killing: transitions past the north-east edge are lost,
/// so every value is a lower bound that is nondecreasing in L.
struct OccupationTable {
  Origin origin{};
  int L = 0;
  int s0 = 0;
  Eigen::VectorXd values;  // ((x1*(L+1))+x2)*s0 + j
  bool exit_mass_absorbed = true;
  double residual = 0;  // sup-norm of the dropped geometric tail
  long sweeps = 0;

  double value(int x1, int x2, int j) const {
    return values[(static_cast<long>(x1) * (L + 1) + x2) * s0 + j];
  }
  /// Lower bound on the expected exit time from the origin.
  double total() const { return values.sum(); }
};

/// Solves n = e_origin + n P restricted to the truncated quadrant, by
/// accumulating the geometric series of the substochastic kernel: relative
/// update below 1e-14 or NumericError after 1e6 sweeps.
OccupationTable truncated_fundamental(const MMRWModel& model, Origin origin, int L);

/// One table per starting background state, from a common (x1, x2).
struct OccupationTableSet {
  int x1 = 0;
  int x2 = 0;
  int L = 0;
  int s0 = 0;
  std::vector<OccupationTable> rows;
};

OccupationTableSet occupation_tables(const MMRWModel& model, int x1, int x2, int L);

/// Monte Carlo estimate of the same visit counts, with 99% confidence
/// half-widths. Identical output for a fixed seed regardless of the worker
/// count: every path owns a splittable RNG substream and the merge is an
/// integer sum.
struct SimulationEstimate {
  Origin origin{};
  int L = 0;
  int s0 = 0;
  long n_paths = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  Eigen::VectorXd mean, half_width;
  long capped_paths = 0;
  bool step_cap_warning = false;  // more than 0.1% of paths hit the step cap

  double mean_at(int x1, int x2, int j) const {
    return mean[(static_cast<long>(x1) * (L + 1) + x2) * s0 + j];
  }
  double half_width_at(int x1, int x2, int j) const {
    return half_width[(static_cast<long>(x1) * (L + 1) + x2) * s0 + j];
  }
};

SimulationEstimate simulate_occupation(const MMRWModel& model, Origin origin, long n_paths,
                                       std::uint64_t seed, int L, int workers = 0);

/// Successive log-ratios r_k = -log(q((k+1)c) / q(kc)) along an integer ray;
/// they approach the directional decay rate from above as k grows.
struct DecayEstimate {
  int k_first = 0;
  std::vector<double> ratios;
  bool underflow_warning = false;

  /// The last ratio (the tail estimate); throws when everything underflowed.
  double tail() const;
};

DecayEstimate empirical_decay(const OccupationTable& table, std::array<int, 2> c, int j_to,
                              int k_min, int k_max);
DecayEstimate empirical_decay(const MMRWModel& model, Origin origin, std::array<int, 2> c,
                              int j_to, int k_min, int k_max, int L);

/// Partial moment generating function of the table set: sum over the window
/// of exp(<theta, x'>) visit counts, indexed (start j, end j').
Eigen::MatrixXd mgf_partial(const OccupationTableSet& tables, std::array<double, 2> theta);
Eigen::MatrixXd mgf_partial(const MMRWModel& model, int x1, int x2, std::array<double, 2> theta,
                            int L);

/// Sup-norm of the one-step balance identity of the occupation generating
/// functions, assembled from the truncated table at z = exp(theta1),
/// w = exp(theta2); tends to 0 with growing L inside the convergence domain.
double functional_equation_residual(const OccupationTableSet& tables, const MMRWModel& model,
                                    std::array<double, 2> theta);
double functional_equation_residual(const MMRWModel& model, int x1, int x2,
                                    std::array<double, 2> theta, int L);

/// Sum of table values over the lattice line c1 x1' + c2 x2' = c1 k
/// (coprime c, c1 <= c2; the symmetric form otherwise).
double marginal_occupation_sum(const OccupationTable& table, int c1, int c2, int j_to, int k);
double marginal_occupation_sum(const MMRWModel& model, Origin origin, int c1, int c2, int j_to,
                               int k, int L);

}  // namespace mmrw
