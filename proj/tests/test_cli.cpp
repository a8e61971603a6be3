#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
  int status = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string out_file = std::string(MMRW_TEST_DATA) + "/../../build/cli_out.tmp";
  const std::string cmd = std::string(MMRW_CLI_PATH) + " " + args + " > " + out_file + " 2>/dev/null";
  RunResult r;
  const int rc = std::system(cmd.c_str());
  r.status = WEXITSTATUS(rc);
  std::ifstream in(out_file);
  std::ostringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  std::remove(out_file.c_str());
  return r;
}

std::string data(const std::string& name) { return std::string(MMRW_TEST_DATA) + "/" + name; }

}  // namespace

TEST_CASE("cli: decay-rate prints the rate and the argmax") {
  const RunResult r = run_cli("--model " + data("r1.json") + " decay-rate --c 1,1");
  CHECK(r.status == 0);
  CHECK(r.out.find("2.19722457") != std::string::npos);
  CHECK(r.out.find("1.09861") != std::string::npos);
}

TEST_CASE("cli: chi at the origin is one") {
  const RunResult r = run_cli("--model " + data("r1.json") + " chi --theta 0,0");
  CHECK(r.status == 0);
  CHECK(r.out.find("\n1\n") != std::string::npos);
}

TEST_CASE("cli: validate reports the degenerate model") {
  const RunResult r = run_cli("--model " + data("r0.json") + " validate");
  CHECK(r.status == 0);
  CHECK(r.out.find("p_plus_irreducible_hint=false") != std::string::npos);
  CHECK(r.out.find("assumption2_satisfied=true") != std::string::npos);
}

TEST_CASE("cli: byte-identical output across repeated runs") {
  const std::string args = "--model " + data("r2.json") + " decay-rate --c 2,3";
  const RunResult a = run_cli(args), b = run_cli(args);
  CHECK(a.status == 0);
  CHECK(a.out == b.out);

  const std::string sim =
      "--model " + data("r1.json") + " simulate --origin 0,0,0 --paths 5000 --seed 9 --L 8";
  const RunResult sa = run_cli(sim + " --workers 1"), sb = run_cli(sim + " --workers 3");
  CHECK(sa.status == 0);
  // identical apart from the echoed worker count
  const auto strip = [](std::string s) {
    std::istringstream in(s);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line))
      if (line.rfind("# workers", 0) != 0) out << line << "\n";
    return out.str();
  };
  CHECK(strip(sa.out) == strip(sb.out));
}

TEST_CASE("cli: refusal and numeric failure exit codes") {
  CHECK(run_cli("--model " + data("missing.json") + " chi --theta 0,0").status == 2);
  CHECK(run_cli("--model " + data("r0.json") + " extreme-points").status == 1);  // unbounded
  CHECK(run_cli("--model " + data("r1.json") + " occupation --origin 99,0,0 --L 8").status == 2);
}

TEST_CASE("cli: gamma-boundary CSV has the documented header") {
  const RunResult r = run_cli("--model " + data("r1.json") + " gamma-boundary --points 5");
  CHECK(r.status == 0);
  CHECK(r.out.find("theta1,zeta_lower,zeta_upper") != std::string::npos);
}

TEST_CASE("cli: cp-curve emits one row per truncation") {
  const RunResult r =
      run_cli("--model " + data("r1.json") + " cp-curve --alpha 1 --K 6,10");
  CHECK(r.status == 0);
  CHECK(r.out.find("K,log_cp") != std::string::npos);
  CHECK(r.out.find("\n6,") != std::string::npos);
  CHECK(r.out.find("\n10,") != std::string::npos);
}

TEST_CASE("cli: empirical-decay emits the ratio rows") {
  const RunResult r = run_cli("--model " + data("r1.json") +
                              " empirical-decay --origin 0,0,0 --c 1,1 --kmin 4 --kmax 8 --L 24");
  CHECK(r.status == 0);
  CHECK(r.out.find("k,r") != std::string::npos);
  CHECK(r.out.find("\n4,2.") != std::string::npos);
  CHECK(r.out.find("\n7,2.") != std::string::npos);
}

TEST_CASE("cli: expand round-trips through the parser") {
  const RunResult r = run_cli("--model " + data("r1.json") + " expand --c 2,1");
  CHECK(r.status == 0);
  const auto brace = r.out.find('{');
  REQUIRE(brace != std::string::npos);
  CHECK(r.out.find("\"s0\": 2") != std::string::npos);
}
