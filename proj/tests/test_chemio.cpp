#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <string>

#include "vibraug/chemio.hpp"
#include "vibraug/fileio.hpp"
#include "vibraug/fixtures.hpp"
#include "vibraug/rng.hpp"

using namespace vibraug;
using chemio::parse_modes;
using chemio::parse_xyz;
using chemio::serialize_modes;
using chemio::serialize_xyz;

static std::string data_path(const char* rel) {
  return std::string(VIBRAUG_SOURCE_DIR "/data/fixtures/") + rel;
}

TEST_CASE("single hydrogen atom round trips") {
  auto mol = parse_xyz("1\nH\nH 0.0 0.0 0.0");
  REQUIRE(mol.natoms() == 1);
  REQUIRE(mol.name == "H");
  REQUIRE(mol.atoms[0].element == "H");
  REQUIRE(mol.atoms[0].mass == 1.00800);
  REQUIRE(serialize_xyz(mol) ==
          "1\nH\nH 0.000000000000 0.000000000000 0.000000000000");
}

TEST_CASE("17-atom diamine fixture parses with order preserved") {
  auto mol = parse_xyz(read_file(data_path("diamine17.xyz")));
  REQUIRE(mol.natoms() == 17);
  REQUIRE(mol.name == "diamine17");
  // 5 carbons, then 2 nitrogens, then 10 hydrogens, exactly in file order.
  for (int i = 0; i < 5; ++i) REQUIRE(mol.atoms[i].element == "C");
  for (int i = 5; i < 7; ++i) REQUIRE(mol.atoms[i].element == "N");
  for (int i = 7; i < 17; ++i) REQUIRE(mol.atoms[i].element == "H");
  REQUIRE(mol.atoms[0].position.y() == Catch::Approx(1.2));
  REQUIRE(mol.atoms[5].mass == 14.0070);
}

TEST_CASE("unknown element symbol is rejected with its line") {
  try {
    parse_xyz("2\nbroken\nH 0 0 0\nQq 1 1 1");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(std::string(e.what()) == "unknown element symbol 'Qq' at line 4");
    REQUIRE(e.line() == 4);
  }
}

TEST_CASE("structural xyz errors carry line numbers") {
  REQUIRE_THROWS_AS(parse_xyz(""), ParseError);
  REQUIRE_THROWS_AS(parse_xyz("abc\nname\n"), ParseError);
  REQUIRE_THROWS_AS(parse_xyz("0\nname"), ParseError);
  REQUIRE_THROWS_AS(parse_xyz("-3\nname"), ParseError);
  REQUIRE_THROWS_AS(parse_xyz("2\nname\nH 0 0 0"), ParseError);         // too few
  REQUIRE_THROWS_AS(parse_xyz("1\nname\nH 0 0 0\nH 1 1 1"), ParseError);  // too many
  REQUIRE_THROWS_AS(parse_xyz("1\nname\nH 0 0"), ParseError);           // short line
  REQUIRE_THROWS_AS(parse_xyz("1\nname\nH 0 0 zero"), ParseError);      // bad real
  try {
    parse_xyz("1\nname\nH 0 0");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(e.line() == 3);
  }
}

TEST_CASE("atom count above the 55-atom limit is rejected") {
  std::string text = "56\ntoo-big";
  for (int i = 0; i < 56; ++i) text += "\nC 0 0 " + std::to_string(i);
  REQUIRE_THROWS_WITH(parse_xyz(text), Catch::Matchers::ContainsSubstring("exceeds limit 55"));
}

TEST_CASE("xyz serialization round trips coordinates bitwise") {
  auto mol = parse_xyz(fixtures::k_chain55_xyz);
  auto again = parse_xyz(serialize_xyz(mol));
  REQUIRE(again.natoms() == mol.natoms());
  for (int i = 0; i < mol.natoms(); ++i) {
    REQUIRE(again.atoms[i].element == mol.atoms[i].element);
    for (int c = 0; c < 3; ++c)
      REQUIRE(again.atoms[i].position[c] == mol.atoms[i].position[c]);
  }
}

TEST_CASE("mode file parses against its molecule") {
  auto mol = parse_xyz(fixtures::k_water_xyz);
  auto set = parse_modes(fixtures::k_water_modes, mol);
  REQUIRE(set.nmodes() == 3);
  REQUIRE(set.molecule_name == "water");
  for (const auto& mode : set.modes) {
    REQUIRE(mode.displacements.size() == 3);
    double norm_sq = 0.0;
    for (const auto& d : mode.displacements) norm_sq += d.squaredNorm();
    REQUIRE(std::abs(std::sqrt(norm_sq) - 1.0) < 1e-12);
  }
  REQUIRE(set.modes[0].frequency_cm1 == 1594.7);
  REQUIRE(set.modes[0].force_constant == Catch::Approx(1.6222));
}

TEST_CASE("comments and blank lines are ignored in mode files") {
  auto mol = parse_xyz(fixtures::k_nitrogen_xyz);
  std::string text = "# vibration data\n\nMODES 1 2\n# fundamental\nMODE 1 2358.6 7.0035 22.9548\n\n0 0 0.7071\n0 0 -0.7071\n";
  auto set = parse_modes(text, mol);
  REQUIRE(set.nmodes() == 1);
}

TEST_CASE("displacements are renormalized on load when the norm drifts") {
  auto mol = parse_xyz(fixtures::k_nitrogen_xyz);
  auto set = parse_modes("MODES 1 2\nMODE 1 100.0 1.0 1.0\n0 0 2.0\n0 0 -2.0\n", mol);
  double norm_sq = 0.0;
  for (const auto& d : set.modes[0].displacements) norm_sq += d.squaredNorm();
  REQUIRE(std::sqrt(norm_sq) == Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("mode serialization is stable under reparse") {
  auto mol = parse_xyz(fixtures::k_acyl_chloride_xyz);
  auto set = parse_modes(fixtures::k_acyl_chloride_modes, mol);
  std::string once = serialize_modes(set);
  auto set2 = parse_modes(once, mol);
  REQUIRE(serialize_modes(set2) == once);
  for (int m = 0; m < set.nmodes(); ++m)
    for (std::size_t a = 0; a < set.modes[m].displacements.size(); ++a)
      for (int c = 0; c < 3; ++c)
        REQUIRE(set2.modes[m].displacements[a][c] == set.modes[m].displacements[a][c]);
}

TEST_CASE("mode file structural errors") {
  auto water = parse_xyz(fixtures::k_water_xyz);
  auto nitrogen = parse_xyz(fixtures::k_nitrogen_xyz);

  // atom count mismatch against owner
  try {
    parse_modes(fixtures::k_water_modes, nitrogen);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE_THAT(e.what(), Catch::Matchers::ContainsSubstring("atom count mismatch"));
    REQUIRE_THAT(e.what(), Catch::Matchers::ContainsSubstring("nitrogen"));
  }

  // imaginary frequency
  REQUIRE_THROWS_WITH(
      parse_modes("MODES 1 2\nMODE 1 -42.0 1.0 1.0\n0 0 1\n0 0 -1\n", nitrogen),
      Catch::Matchers::ContainsSubstring("imaginary or zero frequency"));
  // nonpositive force constant
  REQUIRE_THROWS_WITH(
      parse_modes("MODES 1 2\nMODE 1 42.0 1.0 0.0\n0 0 1\n0 0 -1\n", nitrogen),
      Catch::Matchers::ContainsSubstring("force constant"));
  // zero displacement
  REQUIRE_THROWS_WITH(
      parse_modes("MODES 1 2\nMODE 1 42.0 1.0 1.0\n0 0 0\n0 0 0\n", nitrogen),
      Catch::Matchers::ContainsSubstring("zero displacement"));
  // truncated
  REQUIRE_THROWS_AS(parse_modes("MODES 2 3\nMODE 1 100 1 1\n0 0 1\n0 0 -1\n0 1 0\n", water),
                    ParseError);
  // more modes than 3N
  REQUIRE_THROWS_WITH(parse_modes("MODES 7 2\nMODE 1 1 1 1\n0 0 1\n0 0 -1\n", nitrogen),
                      Catch::Matchers::ContainsSubstring("exceeds 3N"));
  // mode index out of order
  REQUIRE_THROWS_WITH(
      parse_modes("MODES 1 2\nMODE 2 42.0 1.0 1.0\n0 0 1\n0 0 -1\n", nitrogen),
      Catch::Matchers::ContainsSubstring("out of order"));
}

TEST_CASE("parsers never crash on fuzzed input") {
  RngStream rng(2024, 99);
  auto water = parse_xyz(fixtures::k_water_xyz);
  const std::string seeds[] = {fixtures::k_water_xyz, fixtures::k_water_modes,
                               "MODES 1 1\n", "3\nname\n", ""};
  int parsed = 0;
  for (int iter = 0; iter < 20000; ++iter) {
    std::string s = seeds[iter % 5];
    int mutations = 1 + static_cast<int>(rng.uniform_int(8));
    for (int m = 0; m < mutations; ++m) {
      auto pos = s.empty() ? 0 : rng.uniform_int(s.size());
      char c = static_cast<char>(rng.uniform_int(256));
      switch (rng.uniform_int(3)) {
        case 0: if (!s.empty()) s[pos] = c; break;
        case 1: s.insert(s.begin() + static_cast<long>(pos), c); break;
        default: if (!s.empty()) s.erase(s.begin() + static_cast<long>(pos)); break;
      }
    }
    try {
      auto mol = parse_xyz(s);
      parsed += mol.natoms();  // structurally valid result
    } catch (const ParseError&) {
    }
    try {
      auto set = parse_modes(s, water);
      parsed += set.nmodes();
    } catch (const ParseError&) {
    }
  }
  SUCCEED("fuzz loop completed without crash");
}

TEST_CASE("molecular summaries") {
  auto n2 = parse_xyz(fixtures::k_nitrogen_xyz);
  REQUIRE(chemio::molecular_mass(n2) == Catch::Approx(28.014));
  REQUIRE(chemio::mean_pairwise_distance(n2) == Catch::Approx(1.098));
  auto water = parse_xyz(fixtures::k_water_xyz);
  REQUIRE(chemio::molecular_mass(water) == Catch::Approx(18.015));
  REQUIRE(chemio::mean_pairwise_distance(water) == Catch::Approx(1.1433).epsilon(1e-3));
  auto h = parse_xyz("1\nH\nH 0 0 0");
  REQUIRE(chemio::mean_pairwise_distance(h) == 0.0);
}
