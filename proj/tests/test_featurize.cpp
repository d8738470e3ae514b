#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "vibraug/featurize.hpp"
#include "vibraug/fixtures.hpp"

using namespace vibraug;
using featurize::AtomScalar;
using featurize::Conditions;
using featurize::encode;
using featurize::FeatureVector;
using featurize::kFeatureDim;
using featurize::Scaler;

static Conditions demo_conditions() {
  Conditions c;
  c.aqueous_conc = 2.0;
  c.organic_conc = 0.15;
  c.pressure_bar = 10.0;
  c.substrate = 1;
  return c;
}

TEST_CASE("descriptor length and layout") {
  auto h = chemio::parse_xyz("1\nH\nH 1.0 2.0 3.0");
  auto v = encode(demo_conditions(), h, h);
  REQUIRE(v.size() == 444);
  REQUIRE(v[0] == 2.0);
  REQUIRE(v[1] == 0.15);
  REQUIRE(v[2] == 10.0);
  REQUIRE(v[3] == 1.0);
  // monomer A block: single H at slot 0
  REQUIRE(v[4] == 1.00800);
  REQUIRE(v[5] == 1.0);
  REQUIRE(v[6] == 2.0);
  REQUIRE(v[7] == 3.0);
  // remaining A slots zero
  for (int d = 8; d < 224; ++d) REQUIRE(v[d] == 0.0);
  // monomer B block mirrors at offset 224
  REQUIRE(v[224] == 1.00800);
  REQUIRE(v[225] == 1.0);
  REQUIRE(v[226] == 2.0);
  REQUIRE(v[227] == 3.0);
  for (int d = 228; d < 444; ++d) REQUIRE(v[d] == 0.0);
}

TEST_CASE("atomic number scalar variant") {
  auto water = fixtures::molecule("water");
  auto v = encode(demo_conditions(), water, water, AtomScalar::atomic_number);
  REQUIRE(v[4] == 8.0);   // O
  REQUIRE(v[8] == 1.0);   // H
  REQUIRE(v[12] == 1.0);  // H
}

TEST_CASE("a 55-atom monomer fills its block exactly") {
  auto big = fixtures::molecule("chain55");
  auto small = fixtures::molecule("water");
  auto v = encode(demo_conditions(), big, small);
  // last A slot occupied
  REQUIRE(v[4 + 54 * 4] != 0.0);
  // B block padding after 3 atoms
  for (int d = 224 + 3 * 4; d < 444; ++d) REQUIRE(v[d] == 0.0);
}

TEST_CASE("monomers beyond 55 atoms are refused") {
  chemio::Molecule big;
  big.name = "oversized";
  for (int i = 0; i < 56; ++i) {
    chemio::Atom a;
    a.element = "C";
    a.mass = 12.011;
    a.position = {0.0, 0.0, static_cast<double>(i)};
    big.atoms.push_back(a);
  }
  auto water = fixtures::molecule("water");
  REQUIRE_THROWS_WITH(encode(demo_conditions(), big, water),
                      Catch::Matchers::ContainsSubstring("56 atoms, limit is 55"));
}

TEST_CASE("condition validation") {
  auto water = fixtures::molecule("water");
  Conditions c = demo_conditions();
  c.pressure_bar = 0.0;
  REQUIRE_THROWS_AS(encode(c, water, water), Error);
  c = demo_conditions();
  c.substrate = 3;
  REQUIRE_THROWS_AS(encode(c, water, water), Error);
  c = demo_conditions();
  c.aqueous_conc = -0.1;
  REQUIRE_THROWS_AS(encode(c, water, water), Error);
}

TEST_CASE("distinct geometries produce distinct descriptors") {
  auto water = fixtures::molecule("water");
  auto shifted = water;
  shifted.atoms[2].position.z() += 1e-9;
  auto v1 = encode(demo_conditions(), water, water);
  auto v2 = encode(demo_conditions(), shifted, water);
  REQUIRE(v1 != v2);
}

TEST_CASE("min-max scaling maps the fitted range onto [0,1]") {
  Eigen::MatrixXd rows(3, 2);
  rows << 0.0, 5.0, 1.0, 5.0, 0.5, 5.0;
  auto s = Scaler::fit(rows);
  REQUIRE(s.transform1(0.0, 0) == 0.0);
  REQUIRE(s.transform1(1.0, 0) == 1.0);
  REQUIRE(s.transform1(0.5, 0) == 0.5);
  // constant dimension collapses to zero
  REQUIRE(s.transform1(5.0, 1) == 0.0);
  REQUIRE(s.transform1(123.0, 1) == 0.0);
  // out-of-range values extrapolate rather than clip
  REQUIRE(s.transform1(2.0, 0) == 2.0);
  REQUIRE(s.transform1(-1.0, 0) == -1.0);
}

TEST_CASE("scaling a training matrix lands inside the unit box") {
  vibraug::RngStream rng(13, 21);
  Eigen::MatrixXd rows(40, 6);
  for (int i = 0; i < rows.rows(); ++i)
    for (int d = 0; d < rows.cols(); ++d) rows(i, d) = rng.uniform(-7.0, 9.0);
  rows.col(3).setConstant(2.5);
  auto s = Scaler::fit(rows);
  Eigen::MatrixXd scaled = rows;
  s.transform_in_place(scaled);
  for (int i = 0; i < scaled.rows(); ++i)
    for (int d = 0; d < scaled.cols(); ++d) {
      REQUIRE(scaled(i, d) >= 0.0);
      REQUIRE(scaled(i, d) <= 1.0);
    }
  REQUIRE(scaled.col(3).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-row fit maps everything to zero") {
  Eigen::MatrixXd rows(1, 3);
  rows << 1.0, -2.0, 0.0;
  auto s = Scaler::fit(rows);
  for (int d = 0; d < 3; ++d) REQUIRE(s.transform1(rows(0, d), d) == 0.0);
}

TEST_CASE("scaler text round trip is lossless") {
  Eigen::MatrixXd rows(4, 3);
  rows << 0.1, -5.0, 3.3, 0.7, 2.0, 3.3, -0.2, 0.0, 3.3, 0.4, 1.0, 3.3;
  auto s = Scaler::fit(rows);
  auto back = Scaler::deserialize(s.serialize());
  REQUIRE(back.dims() == 3);
  for (int d = 0; d < 3; ++d) {
    REQUIRE(back.mins()[d] == s.mins()[d]);
    REQUIRE(back.maxs()[d] == s.maxs()[d]);
  }
  REQUIRE_THROWS_AS(Scaler::deserialize("dims 2\n0 1\n"), ParseError);
  REQUIRE_THROWS_AS(Scaler::deserialize(""), ParseError);
}

TEST_CASE("feature-vector helpers agree with the matrix path") {
  auto water = fixtures::molecule("water");
  auto n2 = fixtures::molecule("nitrogen");
  std::vector<FeatureVector> rows;
  Conditions c = demo_conditions();
  for (int i = 0; i < 5; ++i) {
    c.pressure_bar = 4.0 + i;
    rows.push_back(encode(c, water, n2));
  }
  auto s = featurize::fit_scaler(rows);
  REQUIRE(s.dims() == kFeatureDim);
  auto t = featurize::transform(s, rows[2]);
  REQUIRE(t[2] == 0.5);  // pressure midpoint of [4, 8]
  for (int d = 0; d < kFeatureDim; ++d) {
    REQUIRE(t[d] >= 0.0);
    REQUIRE(t[d] <= 1.0);
  }
}
