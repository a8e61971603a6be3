#include "mmrw/model.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace mmrw {

namespace {

constexpr double kRowSumTol = 1e-12;

int parse_offset(const std::string& key, const std::string& part) {
  if (part == "-1") return -1;
  if (part == "0") return 0;
  if (part == "1") return 1;
  throw ModelError("block key '" + key + "': offsets must be -1, 0 or 1");
}

double to_probability(const nlohmann::json& v, const std::string& where) {
  double x;
  if (v.is_number()) {
    x = v.get<double>();
  } else if (v.is_string()) {
    const std::string s = v.get<std::string>();
    char* end = nullptr;
    x = std::strtod(s.c_str(), &end);
    if (end == nullptr || *end != '\0' || s.empty())
      throw ModelError(where + ": '" + s + "' is not a decimal number");
  } else {
    throw ModelError(where + ": expected number or decimal string");
  }
  if (!(x >= 0.0) || !(x <= 1.0))
    throw ModelError(where + ": entry " + std::to_string(x) + " outside [0,1]");
  return x;
}

}  // namespace

MMRWModel MMRWModel::zeros(int s0) {
  if (s0 < 1) throw ModelError("s0 must be a positive integer");
  MMRWModel m;
  m.s0 = s0;
  for (auto& b : m.blocks) b = Eigen::MatrixXd::Zero(s0, s0);
  return m;
}

Eigen::MatrixXd MMRWModel::total() const {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(s0, s0);
  for (const auto& b : blocks) t += b;
  return t;
}

void MMRWModel::check() const {
  if (s0 < 1) throw ModelError("s0 must be a positive integer");
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      const Eigen::MatrixXd& b = block(i, j);
      if (b.rows() != s0 || b.cols() != s0)
        throw ModelError("block A(" + std::to_string(i) + "," + std::to_string(j) +
                         ") is not s0 x s0");
      if (b.minCoeff() < 0.0 || b.maxCoeff() > 1.0)
        throw ModelError("block A(" + std::to_string(i) + "," + std::to_string(j) +
                         ") has an entry outside [0,1]");
    }
  }
  const Eigen::VectorXd sums = total().rowwise().sum();
  for (int r = 0; r < s0; ++r) {
    if (std::abs(sums[r] - 1.0) > kRowSumTol) {
      std::ostringstream os;
      os << "not stochastic: row " << r << " of the block sum is " << sums[r];
      throw ModelError(os.str());
    }
  }
}

MMRWModel parse_model(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ModelError("model file: top level must be an object");
  if (!doc.contains("s0") || !doc["s0"].is_number_integer())
    throw ModelError("model file: missing integer field 's0'");
  const int s0 = doc["s0"].get<int>();
  MMRWModel m = MMRWModel::zeros(s0);
  if (doc.contains("blocks")) {
    if (!doc["blocks"].is_object())
      throw ModelError("model file: 'blocks' must be an object");
    for (const auto& [key, rows] : doc["blocks"].items()) {
      const auto comma = key.find(',');
      if (comma == std::string::npos)
        throw ModelError("block key '" + key + "': expected '<i>,<j>'");
      const int i = parse_offset(key, key.substr(0, comma));
      const int j = parse_offset(key, key.substr(comma + 1));
      if (!rows.is_array() || static_cast<int>(rows.size()) != s0)
        throw ModelError("block '" + key + "': expected " + std::to_string(s0) + " rows");
      Eigen::MatrixXd b(s0, s0);
      for (int r = 0; r < s0; ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != s0)
          throw ModelError("block '" + key + "' row " + std::to_string(r) +
                           ": expected " + std::to_string(s0) + " entries");
        for (int c = 0; c < s0; ++c)
          b(r, c) = to_probability(row[static_cast<std::size_t>(c)],
                                   "block '" + key + "' entry (" + std::to_string(r) +
                                       "," + std::to_string(c) + ")");
      }
      m.block(i, j) = b;
    }
  }
  m.check();
  return m;
}

std::string serialize_model(const MMRWModel& model) {
  nlohmann::json doc;
  doc["s0"] = model.s0;
  nlohmann::json blocks = nlohmann::json::object();
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      const Eigen::MatrixXd& b = model.block(i, j);
      if (b.isZero(0.0)) continue;
      nlohmann::json rows = nlohmann::json::array();
      for (int r = 0; r < model.s0; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < model.s0; ++c) row.push_back(b(r, c));
        rows.push_back(row);
      }
      blocks[std::to_string(i) + "," + std::to_string(j)] = rows;
    }
  }
  doc["blocks"] = blocks;
  return doc.dump(2);
}

DriftVector drift(const MMRWModel& model) {
  model.check();
  const int n = model.s0;
  const Eigen::MatrixXd A = model.total();
  // pi A = pi with the last balance equation replaced by normalization.
  Eigen::MatrixXd M = A.transpose() - Eigen::MatrixXd::Identity(n, n);
  M.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[n - 1] = 1.0;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (lu.rank() < n)
    throw NumericError("stationary system is singular; background chain looks reducible");
  Eigen::VectorXd pi = lu.solve(rhs);
  const double res = (pi.transpose() * A - pi.transpose()).cwiseAbs().maxCoeff();
  if (!pi.allFinite() || res > 1e-10 || pi.minCoeff() < -1e-10)
    throw NumericError("stationary system is singular; background chain looks reducible");
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();

  DriftVector d;
  d.pi = pi;
  Eigen::MatrixXd row_m = Eigen::MatrixXd::Zero(n, n);  // A(-1,*), A(1,*)
  Eigen::MatrixXd row_p = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd col_m = Eigen::MatrixXd::Zero(n, n);  // A(*,-1), A(*,1)
  Eigen::MatrixXd col_p = Eigen::MatrixXd::Zero(n, n);
  for (int k = -1; k <= 1; ++k) {
    row_m += model.block(-1, k);
    row_p += model.block(1, k);
    col_m += model.block(k, -1);
    col_p += model.block(k, 1);
  }
  d.a1 = (pi.transpose() * (row_p - row_m)).sum();
  d.a2 = (pi.transpose() * (col_p - col_m)).sum();
  return d;
}

MMRWModel swap_axes(const MMRWModel& model) {
  MMRWModel out = MMRWModel::zeros(model.s0);
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) out.block(i, j) = model.block(j, i);
  return out;
}

void require_negative_drift(const MMRWModel& model) {
  const DriftVector d = drift(model);
  if (!(d.a1 < 0.0 || d.a2 < 0.0)) {
    std::ostringstream os;
    os << "drift assumption fails: a=(" << d.a1 << "," << d.a2
       << "); need a1<0 or a2<0, occupation measures may be infinite";
    throw ModelError(os.str());
  }
}

namespace {

// Strong connectivity of {0..n-1} under an edge enumerator: forward and
// backward BFS from node 0 must both cover everything.
bool strongly_connected(int n, const std::vector<std::vector<int>>& adj) {
  if (n == 0) return false;
  std::vector<std::vector<int>> radj(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u)
    for (int v : adj[static_cast<std::size_t>(u)])
      radj[static_cast<std::size_t>(v)].push_back(u);
  auto covers = [n](const std::vector<std::vector<int>>& g) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : g[static_cast<std::size_t>(u)]) {
        if (!seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };
  return covers(adj) && covers(radj);
}

}  // namespace

ValidationReport validate(const MMRWModel& model, int window) {
  if (window < 1) throw ModelError("window must be a positive integer");
  ValidationReport rep;
  rep.window_size = window;
  try {
    model.check();
    rep.stochastic = true;
  } catch (const ModelError&) {
    rep.stochastic = false;
  }

  const int s0 = model.s0;

  // P-irreducibility on a (2w+1)^2 torus: wrapping keeps every direction
  // available, so this only probes the communication structure of the blocks.
  {
    const int n = 2 * window + 1;
    const int states = n * n * s0;
    auto id = [&](int x, int y, int j) { return (x * n + y) * s0 + j; };
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(states));
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        for (int j = 0; j < s0; ++j)
          for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj) {
              const Eigen::MatrixXd& b = model.block(di, dj);
              for (int jp = 0; jp < s0; ++jp)
                if (b(j, jp) > 0.0)
                  adj[static_cast<std::size_t>(id(x, y, j))].push_back(
                      id((x + di + n) % n, (y + dj + n) % n, jp));
            }
    rep.p_irreducible_hint = strongly_connected(states, adj);
  }

  // P+ irreducibility: restriction to [0,w]^2, transitions leaving the box
  // dropped.
  {
    const int n = window + 1;
    const int states = n * n * s0;
    auto id = [&](int x, int y, int j) { return (x * n + y) * s0 + j; };
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(states));
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        for (int j = 0; j < s0; ++j)
          for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj) {
              const int xp = x + di, yp = y + dj;
              if (xp < 0 || xp >= n || yp < 0 || yp >= n) continue;
              const Eigen::MatrixXd& b = model.block(di, dj);
              for (int jp = 0; jp < s0; ++jp)
                if (b(j, jp) > 0.0)
                  adj[static_cast<std::size_t>(id(x, y, j))].push_back(id(xp, yp, jp));
            }
    rep.p_plus_irreducible_hint = strongly_connected(states, adj);
  }

  // Aperiodicity: gcd of closed-walk lengths of the free (unbounded) walk,
  // searched up to length 2*s0+4.
  {
    const int maxlen = 2 * s0 + 4;
    const int span = 2 * maxlen + 1;
    auto did = [&](int dx, int dy, int j) {
      return ((dx + maxlen) * span + (dy + maxlen)) * s0 + j;
    };
    long g = 0;
    for (int j0 = 0; j0 < s0; ++j0) {
      std::vector<char> cur(static_cast<std::size_t>(span * span * s0), 0);
      cur[static_cast<std::size_t>(did(0, 0, j0))] = 1;
      for (int t = 1; t <= maxlen; ++t) {
        std::vector<char> next(cur.size(), 0);
        for (int dx = -maxlen; dx <= maxlen; ++dx) {
          for (int dy = -maxlen; dy <= maxlen; ++dy)
            for (int j = 0; j < s0; ++j) {
              if (!cur[static_cast<std::size_t>(did(dx, dy, j))]) continue;
              for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                  const int nx = dx + di, ny = dy + dj;
                  if (nx < -maxlen || nx > maxlen || ny < -maxlen || ny > maxlen) continue;
                  const Eigen::MatrixXd& b = model.block(di, dj);
                  for (int jp = 0; jp < s0; ++jp)
                    if (b(j, jp) > 0.0) next[static_cast<std::size_t>(did(nx, ny, jp))] = 1;
                }
            }
        }
        cur.swap(next);
        if (cur[static_cast<std::size_t>(did(0, 0, j0))]) g = std::gcd(g, static_cast<long>(t));
      }
    }
    rep.aperiodic_hint = (g == 1);
  }

  try {
    rep.drift = drift(model);
    rep.assumption2_satisfied = rep.drift.a1 < 0.0 || rep.drift.a2 < 0.0;
  } catch (const NumericError&) {
    rep.drift.a1 = std::numeric_limits<double>::quiet_NaN();
    rep.drift.a2 = std::numeric_limits<double>::quiet_NaN();
    rep.assumption2_satisfied = false;
  }
  return rep;
}

}  // namespace mmrw
