#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <string>

#include "vibraug/featurize.hpp"
#include "vibraug/fileio.hpp"
#include "vibraug/fixtures.hpp"

using namespace vibraug;

TEST_CASE("every fixture parses and is self-consistent") {
  for (const auto& f : fixtures::library()) {
    auto mol = chemio::parse_xyz(f.xyz);
    REQUIRE(mol.name == f.name);
    REQUIRE(mol.natoms() >= 2);
    REQUIRE(mol.natoms() <= chemio::kMaxAtoms);
    if (f.modes) {
      auto set = chemio::parse_modes(f.modes, mol);
      REQUIRE(set.nmodes() >= 1);
      for (const auto& mode : set.modes) {
        REQUIRE(mode.force_constant > 0.0);
        REQUIRE(mode.frequency_cm1 > 0.0);
        double norm_sq = 0.0;
        for (const auto& d : mode.displacements) norm_sq += d.squaredNorm();
        REQUIRE(std::abs(std::sqrt(norm_sq) - 1.0) < 1e-12);
      }
    }
  }
}

TEST_CASE("embedded fixtures match the committed files byte for byte") {
  const std::string base = VIBRAUG_SOURCE_DIR "/data/fixtures/";
  for (const auto& f : fixtures::library()) {
    REQUIRE(read_file(base + f.name + ".xyz") == f.xyz);
    if (f.modes) REQUIRE(read_file(base + f.name + ".modes") == f.modes);
  }
}

TEST_CASE("library lookups") {
  REQUIRE(fixtures::molecule("water").natoms() == 3);
  REQUIRE(fixtures::modes("nitrogen")->nmodes() == 1);
  REQUIRE_THROWS_AS(fixtures::molecule("studtite"), Error);
  REQUIRE_THROWS_WITH(fixtures::modes("diamine17"),
                      Catch::Matchers::ContainsSubstring("no mode data"));
}

TEST_CASE("chain55 sits exactly at the atom-slot limit") {
  auto mol = fixtures::molecule("chain55");
  REQUIRE(mol.natoms() == 55);
  auto water = fixtures::molecule("water");
  featurize::Conditions c;
  c.aqueous_conc = 1.0;
  c.organic_conc = 1.0;
  c.pressure_bar = 5.0;
  c.substrate = 0;
  auto v = featurize::encode(c, mol, water);
  REQUIRE(v[4 + 54 * 4] == 1.00800);  // last slot is a hydrogen
}

TEST_CASE("synthesis pools reference fixtures with mode data") {
  for (const char* name : fixtures::kAminePool) REQUIRE(fixtures::modes(name) != nullptr);
  for (const char* name : fixtures::kAcylPool) REQUIRE(fixtures::modes(name) != nullptr);
}

TEST_CASE("linear toy set is deterministic with the advertised shape") {
  Eigen::MatrixXd x1, x2;
  Eigen::VectorXd y1, y2;
  fixtures::linear_toy(50, 8, 7, x1, y1);
  fixtures::linear_toy(50, 8, 7, x2, y2);
  REQUIRE(x1.rows() == 50);
  REQUIRE(x1.cols() == 8);
  REQUIRE(y1.size() == 50);
  REQUIRE((x1 - x2).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((y1 - y2).cwiseAbs().maxCoeff() == 0.0);
  Eigen::MatrixXd x3;
  Eigen::VectorXd y3;
  fixtures::linear_toy(50, 8, 8, x3, y3);
  REQUIRE((x1 - x3).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("step toy set") {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  fixtures::step_toy(x, y);
  REQUIRE(x.rows() == 4);
  REQUIRE(x.cols() == 1);
  REQUIRE(y[0] == 1.0);
  REQUIRE(y[3] == 3.0);
}
