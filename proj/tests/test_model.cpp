#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "mmrw/model.hpp"

using namespace mmrw;

TEST_CASE("parse_model reads R1 exactly") {
  const MMRWModel m = parse_model(fixtures::r1_json());
  CHECK(m.s0 == 1);
  CHECK(m.block(-1, 0)(0, 0) == 0.3);
  CHECK(m.block(1, 0)(0, 0) == 0.1);
  CHECK(m.block(0, -1)(0, 0) == 0.3);
  CHECK(m.block(0, 1)(0, 0) == 0.1);
  CHECK(m.block(0, 0)(0, 0) == 0.2);
  CHECK(m.block(1, 1)(0, 0) == 0.0);  // omitted key
}

TEST_CASE("parse_model accepts decimal strings and the single-entry model") {
  const MMRWModel m = parse_model(R"({"s0":1,"blocks":{"-1,-1":[["1.0"]]}})");
  CHECK(m.block(-1, -1)(0, 0) == 1.0);
}

TEST_CASE("parse_model rejects broken input") {
  CHECK_THROWS_WITH_AS(parse_model(R"({"s0":1,"blocks":{"0,0":[[0.9]]}})"),
                       doctest::Contains("not stochastic"), ModelError);
  CHECK_THROWS_AS(parse_model(R"({"s0":1,"blocks":{"0,0":[[-0.1]],"0,1":[[1.1]]}})"),
                  ModelError);
  CHECK_THROWS_AS(parse_model(R"({"s0":1,"blocks":{"2,0":[[1.0]]}})"), ModelError);
  CHECK_THROWS_AS(parse_model("not json"), ModelError);
  CHECK_THROWS_AS(parse_model(R"({"blocks":{}})"), ModelError);
}

TEST_CASE("serialize then parse is the identity on block values") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const MMRWModel m = fixtures::random_model(3, seed);
    const MMRWModel back = parse_model(serialize_model(m));
    REQUIRE(back.s0 == m.s0);
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j) CHECK(back.block(i, j) == m.block(i, j));
  }
}

TEST_CASE("validate: R1 passes every hint") {
  const ValidationReport rep = validate(fixtures::r1(), 6);
  CHECK(rep.stochastic);
  CHECK(rep.p_irreducible_hint);
  CHECK(rep.p_plus_irreducible_hint);
  CHECK(rep.aperiodic_hint);
  CHECK(rep.assumption2_satisfied);
  CHECK(rep.window_size == 6);
}

TEST_CASE("validate: R0 is not irreducible on the quadrant") {
  const ValidationReport rep = validate(fixtures::r0(), 6);
  CHECK(rep.stochastic);
  CHECK_FALSE(rep.p_plus_irreducible_hint);
  CHECK(rep.assumption2_satisfied);
}

TEST_CASE("validate: the frozen chain never moves") {
  MMRWModel m = MMRWModel::zeros(2);
  m.block(0, 0) = Eigen::MatrixXd::Identity(2, 2);
  const ValidationReport rep = validate(m, 4);
  CHECK_FALSE(rep.p_irreducible_hint);
}

TEST_CASE("drift reference values") {
  const DriftVector d1 = drift(fixtures::r1());
  CHECK(d1.a1 == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(d1.a2 == doctest::Approx(-0.2).epsilon(1e-12));

  const DriftVector d0 = drift(fixtures::r0());
  CHECK(d0.a1 == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(d0.a2 == doctest::Approx(-1.0).epsilon(1e-12));

  const DriftVector d2 = drift(fixtures::r2());
  CHECK(d2.a1 == doctest::Approx(-0.2).epsilon(1e-10));
  CHECK(d2.a2 == doctest::Approx(-0.2).epsilon(1e-10));
  CHECK(d2.pi[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("drift rejects a reducible background chain") {
  MMRWModel m = MMRWModel::zeros(2);
  m.block(0, -1) = Eigen::MatrixXd::Identity(2, 2);  // two isolated states
  CHECK_THROWS_AS(drift(m), NumericError);
}

TEST_CASE("swap_axes") {
  const MMRWModel r1 = fixtures::r1();
  const MMRWModel s = swap_axes(r1);
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) CHECK(s.block(i, j) == r1.block(i, j));  // symmetric model

  MMRWModel m = MMRWModel::zeros(1);
  m.block(1, 0)(0, 0) = 0.4;
  m.block(-1, 0)(0, 0) = 0.6;
  MMRWModel sw = swap_axes(m);
  CHECK(sw.block(0, 1)(0, 0) == 0.4);
  CHECK(sw.block(0, -1)(0, 0) == 0.6);
  CHECK(sw.block(1, 0)(0, 0) == 0.0);

  const MMRWModel rnd = fixtures::random_model(3, 77);
  const MMRWModel twice = swap_axes(swap_axes(rnd));
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) CHECK(twice.block(i, j) == rnd.block(i, j));
}

TEST_CASE("properties on random models") {
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const MMRWModel m = fixtures::random_model(2 + static_cast<int>(seed % 3), seed);
    CHECK_NOTHROW(m.check());
    const Eigen::VectorXd sums = m.total().rowwise().sum();
    for (int r = 0; r < m.s0; ++r) CHECK(std::abs(sums[r] - 1.0) <= 1e-12);

    const DriftVector d = drift(m);
    const DriftVector ds = drift(swap_axes(m));
    CHECK(ds.a1 == doctest::Approx(d.a2).epsilon(1e-12));
    CHECK(ds.a2 == doctest::Approx(d.a1).epsilon(1e-12));
  }
}
