#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmrw/decay.hpp"
#include "mmrw/gamma.hpp"
#include "mmrw/model.hpp"
#include "mmrw/occupation.hpp"
#include "mmrw/qbd.hpp"
#include "mmrw/spectral.hpp"

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

mmrw::MMRWModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mmrw::ModelError("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return mmrw::parse_model(ss.str());
}

std::array<double, 2> parse_real_pair(const std::string& s, const std::string& flag) {
  const auto comma = s.find(',');
  if (comma == std::string::npos)
    throw mmrw::ModelError(flag + ": expected '<a>,<b>', got '" + s + "'");
  try {
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw mmrw::ModelError(flag + ": expected two reals, got '" + s + "'");
  }
}

std::array<int, 2> parse_int_pair(const std::string& s, const std::string& flag) {
  const auto comma = s.find(',');
  if (comma == std::string::npos)
    throw mmrw::ModelError(flag + ": expected '<a>,<b>', got '" + s + "'");
  try {
    return {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw mmrw::ModelError(flag + ": expected two integers, got '" + s + "'");
  }
}

mmrw::Origin parse_origin(const std::string& s) {
  int x1, x2, j;
  if (std::sscanf(s.c_str(), "%d,%d,%d", &x1, &x2, &j) != 3)
    throw mmrw::ModelError("--origin: expected '<x1>,<x2>,<j>', got '" + s + "'");
  return {x1, x2, j};
}

// Echoes effective flag values; printed before any command output so runs are
// self-describing and byte-stable.
void run_header(const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [k, v] : kv) std::cout << "# " << k << "=" << v << "\n";
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void write_csv(std::ostream& os) const {
    for (std::size_t c = 0; c < columns.size(); ++c)
      os << columns[c] << (c + 1 < columns.size() ? "," : "\n");
    for (const auto& row : rows)
      for (std::size_t c = 0; c < row.size(); ++c)
        os << row[c] << (c + 1 < row.size() ? "," : "\n");
  }
  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : rows) {
      nlohmann::json obj;
      for (std::size_t c = 0; c < row.size(); ++c) obj[columns[c]] = row[c];
      arr.push_back(obj);
    }
    return arr;
  }
};

// CSV to --out (or stdout), with a JSON mirror when --json is set.
void emit(const Table& table, const std::string& out, bool json) {
  if (out.empty()) {
    if (json)
      std::cout << table.to_json().dump(2) << "\n";
    else
      table.write_csv(std::cout);
    return;
  }
  std::ofstream os(out);
  if (!os) throw mmrw::ModelError("cannot write output file: " + out);
  table.write_csv(os);
  if (json) {
    std::ofstream js(out + ".json");
    if (!js) throw mmrw::ModelError("cannot write output file: " + out + ".json");
    js << table.to_json().dump(2) << "\n";
  }
}

int simulation_workers(int requested) {
  int workers = requested;
  if (const char* env = std::getenv("QD_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1 && (workers <= 0 || workers > cap)) workers = cap;
  }
  return workers;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decay rates and occupation measures of 2-d skip-free Markov-modulated walks"};
  app.require_subcommand(1);
  app.fallthrough();  // --model/--out/--json may follow the subcommand

  std::string model_path, out_path;
  bool json_mirror = false;
  app.add_option("--model", model_path, "model JSON file")->required();
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_flag("--json", json_mirror, "mirror CSV output as JSON");

  int window = 6;
  auto* c_validate = app.add_subcommand("validate", "chain diagnostics report");
  c_validate->add_option("--window", window, "reachability window");

  std::string theta_s = "0,0";
  auto* c_chi = app.add_subcommand("chi", "Perron root of the transform operator");
  c_chi->add_option("--theta", theta_s, "theta1,theta2")->required();

  int points = 65;
  auto* c_boundary =
      app.add_subcommand("gamma-boundary", "trace the chi = 1 boundary (CSV: theta1,zeta_lower,zeta_upper)");
  c_boundary->add_option("--points", points, "grid size");

  auto* c_extreme =
      app.add_subcommand("extreme-points", "extreme points of the level set (CSV: point,theta1,theta2)");

  std::string c_s = "1,1";
  auto* c_decay = app.add_subcommand("decay-rate", "directional decay rate");
  c_decay->add_option("--c", c_s, "c1,c2 positive integers")->required();

  std::string mc_s = "1,1";
  auto* c_marginal = app.add_subcommand("marginal-decay", "marginal (level-sum) decay rate");
  c_marginal->add_option("--c", mc_s, "coprime c1,c2")->required();

  std::string dom_theta_s = "0,0";
  auto* c_domain = app.add_subcommand("domain", "convergence-domain membership");
  c_domain->add_option("--theta", dom_theta_s, "theta1,theta2")->required();

  std::string origin_s = "0,0,0";
  int L = 64;
  auto* c_occ = app.add_subcommand("occupation", "truncated occupation table (CSV: x1p,x2p,jp,value)");
  c_occ->add_option("--origin", origin_s, "x1,x2,j")->required();
  c_occ->add_option("--L", L, "truncation");

  long n_paths = 1000000;
  std::uint64_t seed = 1;
  int workers = 0;
  auto* c_sim = app.add_subcommand(
      "simulate", "Monte Carlo occupation estimate (CSV: x1p,x2p,jp,mean,half_width)");
  c_sim->add_option("--origin", origin_s, "x1,x2,j")->required();
  c_sim->add_option("--paths", n_paths, "number of paths");
  c_sim->add_option("--seed", seed, "RNG seed");
  c_sim->add_option("--L", L, "tally window");
  c_sim->add_option("--workers", workers, "worker threads (0 = auto, QD_THREADS caps)");

  int k_min = 6, k_max = 12, j_to = 0;
  auto* c_emp = app.add_subcommand("empirical-decay", "ray log-ratios from the table (CSV: k,r)");
  c_emp->add_option("--origin", origin_s, "x1,x2,j (on an axis)")->required();
  c_emp->add_option("--c", c_s, "ray direction")->required();
  c_emp->add_option("--kmin", k_min, "first ray index");
  c_emp->add_option("--kmax", k_max, "last ray index");
  c_emp->add_option("--L", L, "truncation");
  c_emp->add_option("--jto", j_to, "target background state");

  std::string x_s = "0,0";
  auto* c_mgf =
      app.add_subcommand("mgf", "partial moment generating function (CSV: j,jp,value)");
  c_mgf->add_option("--x", x_s, "start x1,x2")->required();
  c_mgf->add_option("--theta", theta_s, "theta1,theta2")->required();
  c_mgf->add_option("--L", L, "truncation");

  auto* c_res = app.add_subcommand("residual", "functional-equation residual");
  c_res->add_option("--x", x_s, "start x1,x2")->required();
  c_res->add_option("--theta", theta_s, "theta1,theta2")->required();
  c_res->add_option("--L", L, "truncation");

  std::string alpha_s = "1";
  int K = 40;
  auto* c_rate = app.add_subcommand(
      "rate-matrix", "rate matrix of a QBD re-blocking (--out CSV: row,col,value)");
  c_rate->add_option("--alpha", alpha_s, "representation: 1, 2 or 11");
  c_rate->add_option("--K", K, "phase truncation");

  std::string klist_s = "10,20,40";
  auto* c_curve = app.add_subcommand("cp-curve", "log cp refinement curve over K (CSV: K,log_cp)");
  c_curve->add_option("--alpha", alpha_s, "representation: 1, 2 or 11");
  c_curve->add_option("--K", klist_s, "comma-separated truncations");

  auto* c_expand = app.add_subcommand("expand", "quotient/remainder re-blocking");
  c_expand->add_option("--c", c_s, "expansion direction c1,c2")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const mmrw::MMRWModel model = load_model(model_path);

    if (c_validate->parsed()) {
      run_header({{"model", model_path}, {"window", std::to_string(window)}});
      const mmrw::ValidationReport rep = mmrw::validate(model, window);
      std::cout << "stochastic=" << (rep.stochastic ? "true" : "false") << "\n"
                << "p_irreducible_hint=" << (rep.p_irreducible_hint ? "true" : "false") << "\n"
                << "p_plus_irreducible_hint="
                << (rep.p_plus_irreducible_hint ? "true" : "false") << "\n"
                << "aperiodic_hint=" << (rep.aperiodic_hint ? "true" : "false") << "\n"
                << "a1=" << fmt(rep.drift.a1) << "\n"
                << "a2=" << fmt(rep.drift.a2) << "\n"
                << "assumption2_satisfied=" << (rep.assumption2_satisfied ? "true" : "false")
                << "\n";
    } else if (c_chi->parsed()) {
      const auto theta = parse_real_pair(theta_s, "--theta");
      run_header({{"model", model_path}, {"theta", theta_s}});
      std::cout << fmt(mmrw::chi(model, theta[0], theta[1])) << "\n";
    } else if (c_boundary->parsed()) {
      run_header({{"model", model_path}, {"points", std::to_string(points)}});
      Table t;
      t.columns = {"theta1", "zeta_lower", "zeta_upper"};
      for (const mmrw::BoundarySection& s : mmrw::trace_boundary(model, points))
        t.rows.push_back({fmt(s.theta1), fmt(s.zeta_lower), fmt(s.zeta_upper)});
      emit(t, out_path, json_mirror);
    } else if (c_extreme->parsed()) {
      run_header({{"model", model_path}});
      const mmrw::GammaGeometry g = mmrw::extreme_points(model);
      Table t;
      t.columns = {"point", "theta1", "theta2"};
      t.rows = {{"max_theta1", fmt(g.theta_bar_1[0]), fmt(g.theta_bar_1[1])},
                {"max_theta2", fmt(g.theta_bar_2[0]), fmt(g.theta_bar_2[1])},
                {"max_diagonal", fmt(g.theta_bar_11[0]), fmt(g.theta_bar_11[1])},
                {"min_theta1", fmt(g.theta_under_1[0]), fmt(g.theta_under_1[1])},
                {"min_theta2", fmt(g.theta_under_2[0]), fmt(g.theta_under_2[1])}};
      emit(t, out_path, json_mirror);
    } else if (c_decay->parsed()) {
      const auto c = parse_int_pair(c_s, "--c");
      run_header({{"model", model_path}, {"c", c_s}});
      const mmrw::DecayResult res = mmrw::decay_rate(model, c[0], c[1]);
      std::cout << fmt(res.rate) << "\n" << fmt(res.argmax[0]) << "," << fmt(res.argmax[1])
                << "\n";
      if (res.flat_segment) std::cerr << "note: maximizer pinned to an interval endpoint\n";
    } else if (c_marginal->parsed()) {
      const auto c = parse_int_pair(mc_s, "--c");
      run_header({{"model", model_path}, {"c", mc_s}});
      std::cout << fmt(mmrw::marginal_decay_rate(model, c[0], c[1])) << "\n";
    } else if (c_domain->parsed()) {
      const auto theta = parse_real_pair(dom_theta_s, "--theta");
      run_header({{"model", model_path}, {"theta", dom_theta_s}});
      std::cout << (mmrw::domain_contains(model, theta[0], theta[1]) ? "true" : "false")
                << "\n";
    } else if (c_occ->parsed()) {
      const mmrw::Origin origin = parse_origin(origin_s);
      run_header({{"model", model_path}, {"origin", origin_s}, {"L", std::to_string(L)}});
      const mmrw::OccupationTable table = mmrw::truncated_fundamental(model, origin, L);
      Table t;
      t.columns = {"x1p", "x2p", "jp", "value"};
      for (int x1 = 0; x1 <= L; ++x1)
        for (int x2 = 0; x2 <= L; ++x2)
          for (int j = 0; j < model.s0; ++j)
            t.rows.push_back({std::to_string(x1), std::to_string(x2), std::to_string(j),
                              fmt(table.value(x1, x2, j))});
      emit(t, out_path, json_mirror);
    } else if (c_sim->parsed()) {
      const mmrw::Origin origin = parse_origin(origin_s);
      const int eff_workers = simulation_workers(workers);
      run_header({{"model", model_path},
                  {"origin", origin_s},
                  {"paths", std::to_string(n_paths)},
                  {"seed", std::to_string(seed)},
                  {"L", std::to_string(L)},
                  {"workers", std::to_string(eff_workers)}});
      const mmrw::SimulationEstimate est =
          mmrw::simulate_occupation(model, origin, n_paths, seed, L, eff_workers);
      if (est.step_cap_warning)
        std::cerr << "warning: " << est.capped_paths << " paths hit the step cap\n";
      Table t;
      t.columns = {"x1p", "x2p", "jp", "mean", "half_width"};
      for (int x1 = 0; x1 <= L; ++x1)
        for (int x2 = 0; x2 <= L; ++x2)
          for (int j = 0; j < model.s0; ++j)
            t.rows.push_back({std::to_string(x1), std::to_string(x2), std::to_string(j),
                              fmt(est.mean_at(x1, x2, j)), fmt(est.half_width_at(x1, x2, j))});
      emit(t, out_path, json_mirror);
    } else if (c_emp->parsed()) {
      const mmrw::Origin origin = parse_origin(origin_s);
      const auto c = parse_int_pair(c_s, "--c");
      run_header({{"model", model_path},
                  {"origin", origin_s},
                  {"c", c_s},
                  {"kmin", std::to_string(k_min)},
                  {"kmax", std::to_string(k_max)},
                  {"L", std::to_string(L)},
                  {"jto", std::to_string(j_to)}});
      const mmrw::DecayEstimate est =
          mmrw::empirical_decay(model, origin, {c[0], c[1]}, j_to, k_min, k_max, L);
      if (est.underflow_warning)
        std::cerr << "warning: ray values underflowed; k range truncated\n";
      Table t;
      t.columns = {"k", "r"};
      for (std::size_t i = 0; i < est.ratios.size(); ++i)
        t.rows.push_back({std::to_string(est.k_first + static_cast<int>(i)),
                          fmt(est.ratios[i])});
      emit(t, out_path, json_mirror);
    } else if (c_mgf->parsed()) {
      const auto x = parse_int_pair(x_s, "--x");
      const auto theta = parse_real_pair(theta_s, "--theta");
      run_header({{"model", model_path},
                  {"x", x_s},
                  {"theta", theta_s},
                  {"L", std::to_string(L)}});
      const Eigen::MatrixXd M = mmrw::mgf_partial(model, x[0], x[1], theta, L);
      Table t;
      t.columns = {"j", "jp", "value"};
      for (int j = 0; j < model.s0; ++j)
        for (int jp = 0; jp < model.s0; ++jp)
          t.rows.push_back({std::to_string(j), std::to_string(jp), fmt(M(j, jp))});
      emit(t, out_path, json_mirror);
    } else if (c_res->parsed()) {
      const auto x = parse_int_pair(x_s, "--x");
      const auto theta = parse_real_pair(theta_s, "--theta");
      run_header({{"model", model_path},
                  {"x", x_s},
                  {"theta", theta_s},
                  {"L", std::to_string(L)}});
      std::cout << fmt(mmrw::functional_equation_residual(model, x[0], x[1], theta, L)) << "\n";
    } else if (c_rate->parsed()) {
      run_header({{"model", model_path}, {"alpha", alpha_s}, {"K", std::to_string(K)}});
      const mmrw::QbdTriple triple = mmrw::build_qbd(model, mmrw::parse_alpha(alpha_s), K);
      const mmrw::RateMatrix rate = mmrw::solve_rate_matrix(triple);
      const double cp = mmrw::cp_estimate(rate);
      std::cout << "iterations=" << rate.iterations << "\n"
                << "residual=" << fmt(rate.residual) << "\n"
                << "cp=" << fmt(cp) << "\n"
                << "log_cp=" << fmt(std::log(cp)) << "\n";
      if (!out_path.empty()) {
        Table t;
        t.columns = {"row", "col", "value"};
        for (Eigen::Index r = 0; r < rate.R.rows(); ++r)
          for (Eigen::Index c = 0; c < rate.R.cols(); ++c)
            t.rows.push_back({std::to_string(r), std::to_string(c), fmt(rate.R(r, c))});
        emit(t, out_path, json_mirror);
      }
    } else if (c_curve->parsed()) {
      run_header({{"model", model_path}, {"alpha", alpha_s}, {"K", klist_s}});
      Table t;
      t.columns = {"K", "log_cp"};
      std::stringstream ks(klist_s);
      std::string item;
      while (std::getline(ks, item, ',')) {
        const int k = std::stoi(item);
        const double cp = mmrw::cp_estimate(
            mmrw::solve_rate_matrix(mmrw::build_qbd(model, mmrw::parse_alpha(alpha_s), k)));
        t.rows.push_back({std::to_string(k), fmt(std::log(cp))});
      }
      emit(t, out_path, json_mirror);
    } else if (c_expand->parsed()) {
      const auto c = parse_int_pair(c_s, "--c");
      run_header({{"model", model_path}, {"c", c_s}});
      const mmrw::ExpandedModel ex = mmrw::c_expand(model, c[0], c[1]);
      const std::string text = mmrw::serialize_model(ex.expanded);
      if (out_path.empty()) {
        std::cout << text << "\n";
      } else {
        std::ofstream os(out_path);
        if (!os) throw mmrw::ModelError("cannot write output file: " + out_path);
        os << text << "\n";
        std::cout << "s0=" << ex.expanded.s0 << "\n";
      }
    }
  } catch (const mmrw::ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mmrw::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
