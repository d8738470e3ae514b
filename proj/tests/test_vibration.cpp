#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "vibraug/fixtures.hpp"
#include "vibraug/vibration.hpp"

using namespace vibraug;
using vibration::max_amplitude;
using vibration::VibrationConfig;

TEST_CASE("turning-point amplitude matches an independent unit conversion") {
  // Straight SI evaluation: k = 1 mdyn/A = 100 N/m at 298.15 K.
  const double expected_m = std::sqrt(2.0 * 1.380649e-23 * 298.15 / 100.0);
  const double a = max_amplitude(1.0, 298.15);
  REQUIRE(a == Catch::Approx(expected_m * 1e10).margin(1e-12));
  REQUIRE(a == Catch::Approx(0.090735).margin(1e-5));
}

TEST_CASE("amplitude scaling laws are exact") {
  const double base = max_amplitude(1.0, 298.15);
  REQUIRE(max_amplitude(0.25, 298.15) == 2.0 * base);      // A ~ 1/sqrt(k)
  REQUIRE(max_amplitude(4.0, 298.15) == 0.5 * base);
  REQUIRE(max_amplitude(1.0, 4.0 * 298.15) == 2.0 * base);  // A ~ sqrt(T)
  const double k = 3.7, t = 151.0;
  REQUIRE(std::abs(max_amplitude(4.0 * k, t) - 0.5 * max_amplitude(k, t)) == 0.0);
  REQUIRE(std::abs(max_amplitude(k, 4.0 * t) - 2.0 * max_amplitude(k, t)) == 0.0);
}

TEST_CASE("amplitude vanishes with temperature") {
  REQUIRE(max_amplitude(1.0, 1e-300) < 1e-140);
  REQUIRE_THROWS_AS(max_amplitude(0.0, 298.15), Error);
  REQUIRE_THROWS_AS(max_amplitude(-1.0, 298.15), Error);
  REQUIRE_THROWS_AS(max_amplitude(1.0, 0.0), Error);
}

TEST_CASE("mode coordinates never exceed the classical amplitude") {
  auto modes = fixtures::modes("water");
  VibrationConfig cfg;
  RngStream rng(11, 1);
  const auto& mode = modes->modes[0];
  const double a = max_amplitude(mode.force_constant, cfg.temperature_k);
  double sum = 0.0, sum_sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double q = vibration::sample_mode_coordinate(mode, cfg, rng);
    REQUIRE(std::abs(q) <= a);
    sum += q;
    sum_sq += q * q;
  }
  const double sd = std::sqrt(sum_sq / n);
  REQUIRE(std::abs(sum / n) <= 4.0 * sd / std::sqrt(static_cast<double>(n)));
  // sigma defaults to A/3; truncation barely trims it.
  REQUIRE(sd == Catch::Approx(a / 3.0).epsilon(0.02));
}

TEST_CASE("mode coordinate sampling is reproducible") {
  auto modes = fixtures::modes("nitrogen");
  VibrationConfig cfg;
  RngStream a(5, 9), b(5, 9);
  for (int i = 0; i < 100; ++i)
    REQUIRE(vibration::sample_mode_coordinate(modes->modes[0], cfg, a) ==
            vibration::sample_mode_coordinate(modes->modes[0], cfg, b));
}

TEST_CASE("perturbation moves a diatomic only along its axis") {
  auto mol = fixtures::molecule("nitrogen");
  auto modes = fixtures::modes("nitrogen");
  VibrationConfig cfg;
  RngStream rng(3, 0);
  for (int i = 0; i < 200; ++i) {
    auto out = vibration::perturb(mol, *modes, cfg, rng);
    const Eigen::Vector3d d0 = out.atoms[0].position - mol.atoms[0].position;
    const Eigen::Vector3d d1 = out.atoms[1].position - mol.atoms[1].position;
    REQUIRE(d0.x() == 0.0);
    REQUIRE(d0.y() == 0.0);
    REQUIRE(d1.x() == 0.0);
    REQUIRE(d1.y() == 0.0);
    REQUIRE(d0.z() == Catch::Approx(-d1.z()).margin(1e-15));  // antiparallel
  }
}

TEST_CASE("perturbation preserves atom identity bitwise") {
  auto mol = fixtures::molecule("water");
  auto modes = fixtures::modes("water");
  VibrationConfig cfg;
  RngStream rng(17, 4);
  auto out = vibration::perturb(mol, *modes, cfg, rng);
  REQUIRE(out.natoms() == mol.natoms());
  REQUIRE(out.name == mol.name);
  for (int i = 0; i < mol.natoms(); ++i) {
    REQUIRE(out.atoms[i].element == mol.atoms[i].element);
    REQUIRE(out.atoms[i].mass == mol.atoms[i].mass);
  }
}

TEST_CASE("per-atom displacement is bounded by the largest mode amplitude") {
  auto mol = fixtures::molecule("water");
  auto modes = fixtures::modes("water");
  VibrationConfig cfg;
  double a_max = 0.0;
  for (const auto& mode : modes->modes)
    a_max = std::max(a_max, max_amplitude(mode.force_constant, cfg.temperature_k));
  RngStream rng(23, 8);
  for (int i = 0; i < 10000; ++i) {
    auto out = vibration::perturb(mol, *modes, cfg, rng);
    for (int a = 0; a < mol.natoms(); ++a) {
      const double moved = (out.atoms[a].position - mol.atoms[a].position).norm();
      REQUIRE(moved <= a_max + 1e-12);
    }
  }
}

TEST_CASE("mean displacement vanishes over many perturbations") {
  auto mol = fixtures::molecule("water");
  auto modes = fixtures::modes("water");
  VibrationConfig cfg;
  RngStream rng(29, 2);
  const int n = 100000;
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(3, 3);
  Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(3, 3);
  for (int i = 0; i < n; ++i) {
    auto out = vibration::perturb(mol, *modes, cfg, rng);
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < 3; ++c) {
        const double d = out.atoms[a].position[c] - mol.atoms[a].position[c];
        sum(a, c) += d;
        sum_sq(a, c) += d * d;
      }
  }
  for (int a = 0; a < 3; ++a)
    for (int c = 0; c < 3; ++c) {
      const double mean = sum(a, c) / n;
      const double sd = std::sqrt(sum_sq(a, c) / n);
      REQUIRE(std::abs(mean) <= 4.0 * sd / std::sqrt(static_cast<double>(n)) + 1e-18);
    }
}

TEST_CASE("near-zero temperature leaves coordinates untouched") {
  auto mol = fixtures::molecule("water");
  auto modes = fixtures::modes("water");
  VibrationConfig cfg;
  cfg.temperature_k = 1e-300;
  RngStream rng(31, 5);
  auto out = vibration::perturb(mol, *modes, cfg, rng);
  for (int a = 0; a < mol.natoms(); ++a)
    for (int c = 0; c < 3; ++c)
      REQUIRE(out.atoms[a].position[c] == mol.atoms[a].position[c]);
}

TEST_CASE("perturbation is a pure function of its stream") {
  auto mol = fixtures::molecule("aromatic_amine");
  auto modes = fixtures::modes("aromatic_amine");
  VibrationConfig cfg;
  cfg.modes_per_sample = 2;
  RngStream r1(101, 6), r2(101, 6);
  auto a = vibration::perturb(mol, *modes, cfg, r1);
  auto b = vibration::perturb(mol, *modes, cfg, r2);
  for (int i = 0; i < mol.natoms(); ++i)
    for (int c = 0; c < 3; ++c)
      REQUIRE(a.atoms[i].position[c] == b.atoms[i].position[c]);
}

TEST_CASE("modes_per_sample clamps to the modes available") {
  auto mol = fixtures::molecule("nitrogen");
  auto modes = fixtures::modes("nitrogen");
  VibrationConfig cfg;
  cfg.modes_per_sample = 10;
  RngStream rng(7, 7);
  REQUIRE_NOTHROW(vibration::perturb(mol, *modes, cfg, rng));
}

TEST_CASE("config and mode set validation") {
  auto mol = fixtures::molecule("nitrogen");
  auto modes = fixtures::modes("nitrogen");
  RngStream rng(1, 1);
  VibrationConfig bad;
  bad.temperature_k = -5.0;
  REQUIRE_THROWS_AS(vibration::perturb(mol, *modes, bad, rng), Error);
  bad = VibrationConfig{};
  bad.modes_per_sample = 0;
  REQUIRE_THROWS_AS(vibration::perturb(mol, *modes, bad, rng), Error);
  chemio::ModeSet empty;
  REQUIRE_THROWS_WITH(vibration::perturb(mol, empty, VibrationConfig{}, rng),
                      Catch::Matchers::ContainsSubstring("empty mode set"));
}

TEST_CASE("isotropic fallback jitters every coordinate") {
  auto mol = fixtures::molecule("diamine17");
  VibrationConfig cfg;
  RngStream rng(41, 3);
  auto out = vibration::perturb_isotropic(mol, cfg, rng);
  int moved = 0;
  for (int a = 0; a < mol.natoms(); ++a)
    for (int c = 0; c < 3; ++c)
      if (out.atoms[a].position[c] != mol.atoms[a].position[c]) ++moved;
  REQUIRE(moved == 3 * mol.natoms());
}

TEST_CASE("isotropic fallback with zero sigma is the identity") {
  auto mol = fixtures::molecule("diamine17");
  VibrationConfig cfg;
  cfg.fallback_sigma = 0.0;
  RngStream rng(43, 3);
  auto out = vibration::perturb_isotropic(mol, cfg, rng);
  for (int a = 0; a < mol.natoms(); ++a)
    for (int c = 0; c < 3; ++c)
      REQUIRE(out.atoms[a].position[c] == mol.atoms[a].position[c]);
}
