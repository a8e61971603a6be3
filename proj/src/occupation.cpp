#include "mmrw/occupation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

namespace mmrw {

namespace {

constexpr double kUpdateTol = 1e-14;
constexpr long kMaxSweeps = 1000000;
constexpr long kStepCap = 1000000;
constexpr double kUnderflow = 1e-250;
constexpr double kZ99 = 2.5758293035489004;  // two-sided 99% normal quantile
constexpr double kExpGuard = 700.0;

struct Move {
  int di, dj;
  const Eigen::MatrixXd* block;
};

std::vector<Move> nonzero_moves(const MMRWModel& model) {
  std::vector<Move> moves;
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j)
      if (!model.block(i, j).isZero(0.0)) moves.push_back({i, j, &model.block(i, j)});
  return moves;
}

}  // namespace

OccupationTable truncated_fundamental(const MMRWModel& model, Origin origin, int L) {
  model.check();
  require_negative_drift(model);
  if (L < 1) throw ModelError("truncation L must be positive");
  if (origin.x1 < 0 || origin.x1 > L || origin.x2 < 0 || origin.x2 > L || origin.j < 0 ||
      origin.j >= model.s0)
    throw ModelError("origin outside the truncated window");

  const int s0 = model.s0;
  const int side = L + 1;
  const long N = static_cast<long>(side) * side * s0;
  auto id = [&](int x1, int x2, int j) {
    return (static_cast<long>(x1) * side + x2) * s0 + j;
  };
  const std::vector<Move> moves = nonzero_moves(model);

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd next = Eigen::VectorXd::Zero(N);
  delta[id(origin.x1, origin.x2, origin.j)] = 1.0;

  OccupationTable table;
  table.origin = origin;
  table.L = L;
  table.s0 = s0;

  for (long sweep = 1; sweep <= kMaxSweeps; ++sweep) {
    acc += delta;
    next.setZero();
    for (int x1 = 0; x1 < side; ++x1)
      for (int x2 = 0; x2 < side; ++x2)
        for (int j = 0; j < s0; ++j) {
          const double v = delta[id(x1, x2, j)];
          if (v == 0.0) continue;
          for (const Move& mv : moves) {
            const int y1 = x1 + mv.di, y2 = x2 + mv.dj;
            if (y1 < 0 || y1 > L || y2 < 0 || y2 > L) continue;  // killed
            const long base = id(y1, y2, 0);
            for (int jp = 0; jp < s0; ++jp) next[base + jp] += v * (*mv.block)(j, jp);
          }
        }
    // Entrywise-relative update: far states carry values many orders below
    // the origin's, and downstream transforms re-weight them, so a sup-norm
    // test alone would freeze their leading digits too early.
    double rel = 0.0;
    for (long i = 0; i < N; ++i) {
      const double d = next[i];
      if (d > 1e-300) rel = std::max(rel, d / (acc[i] + 1e-280));
    }
    delta.swap(next);
    table.sweeps = sweep;
    if (rel <= kUpdateTol) {
      table.residual = rel;
      table.values = std::move(acc);
      return table;
    }
  }
  throw NumericError("truncated_fundamental: no convergence within the sweep cap");
}

OccupationTableSet occupation_tables(const MMRWModel& model, int x1, int x2, int L) {
  OccupationTableSet set;
  set.x1 = x1;
  set.x2 = x2;
  set.L = L;
  set.s0 = model.s0;
  set.rows.reserve(static_cast<std::size_t>(model.s0));
  for (int j = 0; j < model.s0; ++j)
    set.rows.push_back(truncated_fundamental(model, Origin{x1, x2, j}, L));
  return set;
}

namespace {

// xoshiro256++ with a splitmix64-filled state; one independent stream per
// simulated path so that tallies do not depend on the thread schedule.
struct Xoshiro {
  std::array<std::uint64_t, 4> s{};

  static std::uint64_t splitmix(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  Xoshiro(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
    for (auto& w : s) w = splitmix(x);
    if ((s[0] | s[1] | s[2] | s[3]) == 0) s[0] = 1;
  }
  static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
  std::uint64_t next() {
    const std::uint64_t r = rotl(s[0] + s[3], 23) + s[0];
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return r;
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

struct Jump {
  double cum;
  int di, dj, jp;
};

struct WorkerTally {
  std::vector<std::int64_t> sum, sumsq;
  long capped = 0;
};

}  // namespace

SimulationEstimate simulate_occupation(const MMRWModel& model, Origin origin, long n_paths,
                                       std::uint64_t seed, int L, int workers) {
  model.check();
  require_negative_drift(model);
  if (n_paths < 1) throw ModelError("n_paths must be positive");
  if (L < 1) throw ModelError("truncation L must be positive");
  if (origin.x1 < 0 || origin.x2 < 0 || origin.j < 0 || origin.j >= model.s0)
    throw ModelError("origin must lie in the nonnegative quadrant");

  const int s0 = model.s0;
  const int side = L + 1;
  const long N = static_cast<long>(side) * side * s0;

  // Per-phase cumulative jump rows.
  std::vector<std::vector<Jump>> rows(static_cast<std::size_t>(s0));
  std::vector<double> row_total(static_cast<std::size_t>(s0), 0.0);
  for (int j = 0; j < s0; ++j) {
    double acc = 0.0;
    for (int i = -1; i <= 1; ++i)
      for (int dj = -1; dj <= 1; ++dj) {
        const Eigen::MatrixXd& b = model.block(i, dj);
        for (int jp = 0; jp < s0; ++jp)
          if (b(j, jp) > 0.0) {
            acc += b(j, jp);
            rows[static_cast<std::size_t>(j)].push_back({acc, i, dj, jp});
          }
      }
    row_total[static_cast<std::size_t>(j)] = acc;
  }

  if (workers <= 0)
    workers = std::max(1u, std::min(std::thread::hardware_concurrency(), 4u));
  workers = static_cast<int>(std::min<long>(workers, n_paths));

  auto run_range = [&](long p_begin, long p_end, WorkerTally& tally) {
    tally.sum.assign(static_cast<std::size_t>(N), 0);
    tally.sumsq.assign(static_cast<std::size_t>(N), 0);
    std::vector<long> visited;
    for (long p = p_begin; p < p_end; ++p) {
      Xoshiro rng(seed, static_cast<std::uint64_t>(p));
      int x1 = origin.x1, x2 = origin.x2, j = origin.j;
      visited.clear();
      long steps = 0;
      while (true) {
        if (x1 <= L && x2 <= L)
          visited.push_back((static_cast<long>(x1) * side + x2) * s0 + j);
        if (++steps > kStepCap) {
          ++tally.capped;
          break;
        }
        const auto& row = rows[static_cast<std::size_t>(j)];
        const double u = rng.uniform() * row_total[static_cast<std::size_t>(j)];
        std::size_t lo = 0, hi = row.size() - 1;
        while (lo < hi) {
          const std::size_t mid = (lo + hi) / 2;
          if (row[mid].cum <= u)
            lo = mid + 1;
          else
            hi = mid;
        }
        const Jump& jump = row[lo];
        x1 += jump.di;
        x2 += jump.dj;
        j = jump.jp;
        if (x1 < 0 || x2 < 0) break;  // left the quadrant
      }
      std::sort(visited.begin(), visited.end());
      for (std::size_t a = 0; a < visited.size();) {
        std::size_t b = a;
        while (b < visited.size() && visited[b] == visited[a]) ++b;
        const std::int64_t cnt = static_cast<std::int64_t>(b - a);
        tally.sum[static_cast<std::size_t>(visited[a])] += cnt;
        tally.sumsq[static_cast<std::size_t>(visited[a])] += cnt * cnt;
        a = b;
      }
    }
  };

  std::vector<WorkerTally> tallies(static_cast<std::size_t>(workers));
  {
    std::vector<std::thread> pool;
    const long per = n_paths / workers, extra = n_paths % workers;
    long start = 0;
    for (int w = 0; w < workers; ++w) {
      const long count = per + (w < extra ? 1 : 0);
      pool.emplace_back(run_range, start, start + count, std::ref(tallies[static_cast<std::size_t>(w)]));
      start += count;
    }
    for (auto& t : pool) t.join();
  }

  SimulationEstimate est;
  est.origin = origin;
  est.L = L;
  est.s0 = s0;
  est.n_paths = n_paths;
  est.seed = seed;
  est.workers = workers;
  est.mean = Eigen::VectorXd::Zero(N);
  est.half_width = Eigen::VectorXd::Zero(N);
  std::vector<std::int64_t> sum(static_cast<std::size_t>(N), 0), sumsq(static_cast<std::size_t>(N), 0);
  for (const WorkerTally& t : tallies) {
    est.capped_paths += t.capped;
    for (long i = 0; i < N; ++i) {
      sum[static_cast<std::size_t>(i)] += t.sum[static_cast<std::size_t>(i)];
      sumsq[static_cast<std::size_t>(i)] += t.sumsq[static_cast<std::size_t>(i)];
    }
  }
  const double n = static_cast<double>(n_paths);
  for (long i = 0; i < N; ++i) {
    const double m = static_cast<double>(sum[static_cast<std::size_t>(i)]) / n;
    const double ex2 = static_cast<double>(sumsq[static_cast<std::size_t>(i)]) / n;
    est.mean[i] = m;
    est.half_width[i] = kZ99 * std::sqrt(std::max(ex2 - m * m, 0.0) / n);
  }
  est.step_cap_warning = est.capped_paths * 1000 > n_paths;
  return est;
}

double DecayEstimate::tail() const {
  if (ratios.empty()) throw NumericError("decay estimate: every ray value underflowed");
  return ratios.back();
}

DecayEstimate empirical_decay(const OccupationTable& table, std::array<int, 2> c, int j_to,
                              int k_min, int k_max) {
  const auto [c1, c2] = c;
  if (c1 < 0 || c2 < 0 || c1 + c2 < 1) throw ModelError("ray direction must be nonnegative, nonzero");
  if (j_to < 0 || j_to >= table.s0) throw ModelError("j_to out of range");
  if (!(table.origin.x1 == 0 || table.origin.x2 == 0))
    throw ModelError("empirical decay requires an origin on one of the axes");
  if (k_min < 0 || k_min >= k_max) throw ModelError("need 0 <= k_min < k_max");
  if ((k_max + 1) * std::max(c1, c2) >= table.L - 3)
    throw ModelError("ray leaves the truncated window; raise L or lower k_max");

  DecayEstimate out;
  out.k_first = k_min;
  std::vector<double> q;
  for (int k = k_min; k <= k_max; ++k) {
    const double v = table.value(c1 * k, c2 * k, j_to);
    if (v < kUnderflow) {
      out.underflow_warning = true;
      break;
    }
    q.push_back(v);
  }
  for (std::size_t i = 0; i + 1 < q.size(); ++i)
    out.ratios.push_back(-std::log(q[i + 1] / q[i]));
  return out;
}

DecayEstimate empirical_decay(const MMRWModel& model, Origin origin, std::array<int, 2> c,
                              int j_to, int k_min, int k_max, int L) {
  return empirical_decay(truncated_fundamental(model, origin, L), c, j_to, k_min, k_max);
}

namespace {

void check_mgf_exponent(int L, std::array<double, 2> theta) {
  const double worst =
      L * (std::max(theta[0], 0.0) + std::max(theta[1], 0.0));
  if (worst > kExpGuard) throw NumericError("mgf weights beyond exponent range");
}

}  // namespace

Eigen::MatrixXd mgf_partial(const OccupationTableSet& tables, std::array<double, 2> theta) {
  check_mgf_exponent(tables.L, theta);
  const int s0 = tables.s0, side = tables.L + 1;
  Eigen::VectorXd e1(side), e2(side);
  for (int k = 0; k < side; ++k) {
    e1[k] = std::exp(k * theta[0]);
    e2[k] = std::exp(k * theta[1]);
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(s0, s0);
  for (int j = 0; j < s0; ++j) {
    const OccupationTable& t = tables.rows[static_cast<std::size_t>(j)];
    for (int x1 = 0; x1 < side; ++x1)
      for (int x2 = 0; x2 < side; ++x2) {
        const double w = e1[x1] * e2[x2];
        for (int jp = 0; jp < s0; ++jp) out(j, jp) += w * t.value(x1, x2, jp);
      }
  }
  return out;
}

Eigen::MatrixXd mgf_partial(const MMRWModel& model, int x1, int x2, std::array<double, 2> theta,
                            int L) {
  return mgf_partial(occupation_tables(model, x1, x2, L), theta);
}

namespace {

// C-hat weight sums at (z, w); imin/jmin select the quadrant-restricted
// variants of the kernel generating function.
Eigen::MatrixXd kernel_gf(const MMRWModel& model, double z, double w, int imin, int jmin) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(model.s0, model.s0);
  for (int i = imin; i <= 1; ++i)
    for (int j = jmin; j <= 1; ++j)
      out += std::pow(z, i) * std::pow(w, j) * model.block(i, j);
  return out;
}

}  // namespace

double functional_equation_residual(const OccupationTableSet& tables, const MMRWModel& model,
                                    std::array<double, 2> theta) {
  check_mgf_exponent(tables.L, theta);
  const int s0 = tables.s0, side = tables.L + 1;
  const double z = std::exp(theta[0]), w = std::exp(theta[1]);
  Eigen::VectorXd e1(side), e2(side);
  for (int k = 0; k < side; ++k) {
    e1[k] = std::exp(k * theta[0]);
    e2[k] = std::exp(k * theta[1]);
  }

  Eigen::MatrixXd n00 = Eigen::MatrixXd::Zero(s0, s0);
  Eigen::MatrixXd phi1 = Eigen::MatrixXd::Zero(s0, s0);
  Eigen::MatrixXd phi2 = Eigen::MatrixXd::Zero(s0, s0);
  Eigen::MatrixXd phip = Eigen::MatrixXd::Zero(s0, s0);
  for (int j = 0; j < s0; ++j) {
    const OccupationTable& t = tables.rows[static_cast<std::size_t>(j)];
    for (int jp = 0; jp < s0; ++jp) {
      n00(j, jp) = t.value(0, 0, jp);
      for (int k = 1; k < side; ++k) {
        phi1(j, jp) += e1[k] * t.value(k, 0, jp);
        phi2(j, jp) += e2[k] * t.value(0, k, jp);
      }
      for (int k1 = 1; k1 < side; ++k1)
        for (int k2 = 1; k2 < side; ++k2)
          phip(j, jp) += e1[k1] * e2[k2] * t.value(k1, k2, jp);
    }
  }

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(s0, s0);
  const Eigen::MatrixXd C = kernel_gf(model, z, w, -1, -1);
  const Eigen::MatrixXd C0 = kernel_gf(model, z, w, 0, 0);
  const Eigen::MatrixXd C1 = kernel_gf(model, z, w, -1, 0);
  const Eigen::MatrixXd C2 = kernel_gf(model, z, w, 0, -1);
  const Eigen::MatrixXd lhs = phip * (I - C) + phi1 * (I - C1) + phi2 * (I - C2) +
                              n00 * (I - C0) -
                              std::pow(z, tables.x1) * std::pow(w, tables.x2) * I;
  return lhs.cwiseAbs().maxCoeff();
}

double functional_equation_residual(const MMRWModel& model, int x1, int x2,
                                    std::array<double, 2> theta, int L) {
  return functional_equation_residual(occupation_tables(model, x1, x2, L), model, theta);
}

double marginal_occupation_sum(const OccupationTable& table, int c1, int c2, int j_to, int k) {
  if (c1 < 1 || c2 < 1) throw ModelError("direction must be a pair of positive integers");
  if (std::gcd(c1, c2) != 1) throw ModelError("marginal sums need a coprime direction");
  if (j_to < 0 || j_to >= table.s0) throw ModelError("j_to out of range");
  if (k < 0 || k > table.L) throw ModelError("k outside the truncated window");
  double sum = 0.0;
  if (c1 <= c2) {
    for (int l2 = 0; c2 * l2 <= c1 * k; l2 += c1)
      sum += table.value(k - c2 * (l2 / c1), l2, j_to);
  } else {
    for (int l1 = 0; c1 * l1 <= c2 * k; l1 += c2)
      sum += table.value(l1, k - c1 * (l1 / c2), j_to);
  }
  return sum;
}

double marginal_occupation_sum(const MMRWModel& model, Origin origin, int c1, int c2, int j_to,
                               int k, int L) {
  return marginal_occupation_sum(truncated_fundamental(model, origin, L), c1, c2, j_to, k);
}

}  // namespace mmrw
