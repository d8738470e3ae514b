#pragma once

#include <cmath>
#include <cstdint>

#include "vibraug/chemio.hpp"
#include "vibraug/error.hpp"
#include "vibraug/rng.hpp"

// Thermal perturbation of geometries along harmonic normal modes.
//
// A mode with force constant k (mdyn/A) at temperature T has the classical
// turning-point amplitude A = sqrt(2 kB T / k); displacing past A would
// exceed the thermal energy of the oscillator. Mode coordinates are drawn
// from N(0, (sigma_fraction*A)^2) and redrawn until |q| <= A, then applied
// to the Cartesian positions through the unit displacement pattern.

namespace vibraug::vibration {

constexpr double kBoltzmannJPerK = 1.380649e-23;
// 1 mdyn/A = 100 N/m.
constexpr double kNewtonPerMeterPerMdynA = 100.0;

struct VibrationConfig {
  double temperature_k = 298.15;
  double sigma_fraction = 1.0 / 3.0;
  int modes_per_sample = 1;
  // Per-coordinate Gaussian sigma (angstrom) used when no modes are known.
  double fallback_sigma = 0.03;

  void validate() const {
    if (!(temperature_k > 0.0)) throw Error("temperature must be positive");
    if (!(sigma_fraction > 0.0)) throw Error("sigma_fraction must be positive");
    if (modes_per_sample < 1) throw Error("modes_per_sample must be >= 1");
    if (fallback_sigma < 0.0) throw Error("fallback_sigma must be >= 0");
  }
};

// Classical turning-point amplitude in angstrom.
inline double max_amplitude(double force_constant_mdyn_a, double temperature_k) {
  if (!(force_constant_mdyn_a > 0.0))
    throw Error("force constant must be positive");
  if (!(temperature_k > 0.0)) throw Error("temperature must be positive");
  const double k_si = force_constant_mdyn_a * kNewtonPerMeterPerMdynA;  // N/m
  const double amplitude_m = std::sqrt((2.0 * kBoltzmannJPerK) * temperature_k / k_si);
  return amplitude_m * 1e10;
}

// Truncated normal mode coordinate in angstrom: N(0, (f*A)^2) conditioned on
// |q| <= A by rejection.
inline double sample_mode_coordinate(const chemio::VibrationalMode& mode,
                                     const VibrationConfig& cfg, RngStream& rng) {
  cfg.validate();
  const double amplitude = max_amplitude(mode.force_constant, cfg.temperature_k);
  const double sigma = cfg.sigma_fraction * amplitude;
  if (sigma == 0.0) return 0.0;
  double q;
  do {
    q = rng.normal(0.0, sigma);
  } while (std::abs(q) > amplitude);
  return q;
}

// Displaces a copy of `mol` along `modes_per_sample` distinct modes chosen
// uniformly (clamped to the number of modes available). Atom identities and
// ordering are untouched.
inline chemio::Molecule perturb(const chemio::Molecule& mol,
                                const chemio::ModeSet& modes,
                                const VibrationConfig& cfg, RngStream& rng) {
  cfg.validate();
  if (modes.modes.empty()) throw Error("empty mode set for '" + mol.name + "'");
  for (const auto& mode : modes.modes)
    if (static_cast<int>(mode.displacements.size()) != mol.natoms())
      throw Error("mode displacement count does not match molecule '" + mol.name +
                  "'");

  const int nmodes = modes.nmodes();
  const int pick = cfg.modes_per_sample < nmodes ? cfg.modes_per_sample : nmodes;

  // Partial Fisher-Yates over mode indices.
  std::vector<int> order(nmodes);
  for (int i = 0; i < nmodes; ++i) order[i] = i;
  for (int j = 0; j < pick; ++j) {
    int swap_at = j + static_cast<int>(rng.uniform_int(
                          static_cast<std::uint64_t>(nmodes - j)));
    std::swap(order[j], order[swap_at]);
  }

  chemio::Molecule out = mol;
  for (int j = 0; j < pick; ++j) {
    const auto& mode = modes.modes[static_cast<std::size_t>(order[j])];
    const double q = sample_mode_coordinate(mode, cfg, rng);
    if (q == 0.0) continue;
    for (int a = 0; a < out.natoms(); ++a)
      out.atoms[static_cast<std::size_t>(a)].position +=
          q * mode.displacements[static_cast<std::size_t>(a)];
  }
  return out;
}

// Fallback when no mode data exists: independent Gaussian jitter on every
// Cartesian coordinate.
inline chemio::Molecule perturb_isotropic(const chemio::Molecule& mol,
                                          const VibrationConfig& cfg,
                                          RngStream& rng) {
  cfg.validate();
  chemio::Molecule out = mol;
  if (cfg.fallback_sigma == 0.0) return out;
  for (auto& atom : out.atoms)
    for (int c = 0; c < 3; ++c)
      atom.position[c] += rng.normal(0.0, cfg.fallback_sigma);
  return out;
}

}  // namespace vibraug::vibration
