#pragma once

#include <Eigen/Core>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "vibraug/elements.hpp"
#include "vibraug/error.hpp"

// Geometry and normal-mode file handling.
//
// XYZ layout:
//   line 1: atom count
//   line 2: name / free-form comment
//   then one "symbol x y z" line per atom, coordinates in angstrom.
//
// Mode files are token oriented; blank lines and lines starting with '#'
// are skipped anywhere:
//   MODES <nmodes> <natoms>
//   per mode:
//     MODE <index> <frequency_cm1> <reduced_mass_amu> <force_constant_mdyn_A>
//     natoms lines of "dx dy dz"  (Cartesian displacement, unit 3N-norm)
// Displacements are renormalized on load when the stored norm drifts.

namespace vibraug::chemio {

constexpr int kMaxAtoms = 55;

struct Atom {
  std::string element;
  double mass = 0.0;  // amu
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // angstrom
};

struct Molecule {
  std::string name;
  std::vector<Atom> atoms;
  int natoms() const { return static_cast<int>(atoms.size()); }
};

struct VibrationalMode {
  double frequency_cm1 = 0.0;
  double reduced_mass_amu = 0.0;
  double force_constant = 0.0;  // mdyn/angstrom
  std::vector<Eigen::Vector3d> displacements;  // one per atom
};

struct ModeSet {
  std::string molecule_name;
  std::vector<VibrationalMode> modes;
  int nmodes() const { return static_cast<int>(modes.size()); }
};

namespace detail {

struct Line {
  std::string_view text;
  int number;  // 1-based
};

inline std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  int number = 1;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view raw = (nl == std::string_view::npos)
                               ? text.substr(pos)
                               : text.substr(pos, nl - pos);
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    lines.push_back({raw, number++});
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  // Drop trailing blank lines so files with or without final newline agree.
  while (!lines.empty() && lines.back().text.empty()) lines.pop_back();
  return lines;
}

inline std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

inline double parse_real(std::string_view tok, int line, const char* what) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError("malformed " + std::string(what) + " '" + std::string(tok) +
                         "' at line " + std::to_string(line),
                     line);
  return value;
}

inline long parse_int(std::string_view tok, int line, const char* what) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError("malformed " + std::string(what) + " '" + std::string(tok) +
                         "' at line " + std::to_string(line),
                     line);
  return value;
}

inline std::string format_coord(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12f", v);
  return buf;
}

inline std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline Molecule parse_xyz(std::string_view text) {
  using namespace detail;
  auto lines = split_lines(text);
  if (lines.empty()) throw ParseError("empty xyz input", 1);

  auto count_tokens = tokens(lines[0].text);
  if (count_tokens.size() != 1)
    throw ParseError("malformed atom count at line 1", 1);
  long declared = parse_int(count_tokens[0], 1, "atom count");
  if (declared < 1)
    throw ParseError("atom count must be positive at line 1", 1);
  if (declared > kMaxAtoms)
    throw ParseError("atom count " + std::to_string(declared) + " exceeds limit " +
                         std::to_string(kMaxAtoms) + " at line 1",
                     1);
  if (lines.size() < 2)
    throw ParseError("unexpected end of input: missing name line", 2);

  Molecule mol;
  mol.name = std::string(lines[1].text);
  const std::size_t expected_lines = 2 + static_cast<std::size_t>(declared);
  if (lines.size() < expected_lines)
    throw ParseError("atom count mismatch: declared " + std::to_string(declared) +
                         ", found " + std::to_string(lines.size() - 2),
                     static_cast<int>(lines.size()));
  if (lines.size() > expected_lines)
    throw ParseError("trailing content at line " +
                         std::to_string(lines[expected_lines].number),
                     lines[expected_lines].number);

  mol.atoms.reserve(static_cast<std::size_t>(declared));
  for (long a = 0; a < declared; ++a) {
    const auto& ln = lines[2 + static_cast<std::size_t>(a)];
    auto tk = tokens(ln.text);
    if (tk.size() != 4)
      throw ParseError("malformed atom line at line " + std::to_string(ln.number),
                       ln.number);
    const ElementInfo* elem = find_element(tk[0]);
    if (!elem)
      throw ParseError("unknown element symbol '" + std::string(tk[0]) +
                           "' at line " + std::to_string(ln.number),
                       ln.number);
    Atom atom;
    atom.element = std::string(tk[0]);
    atom.mass = elem->mass;
    atom.position = {parse_real(tk[1], ln.number, "coordinate"),
                     parse_real(tk[2], ln.number, "coordinate"),
                     parse_real(tk[3], ln.number, "coordinate")};
    mol.atoms.push_back(std::move(atom));
  }
  return mol;
}

inline std::string serialize_xyz(const Molecule& mol) {
  std::string out = std::to_string(mol.natoms());
  out += '\n';
  out += mol.name;
  for (const auto& atom : mol.atoms) {
    out += '\n';
    out += atom.element;
    for (int c = 0; c < 3; ++c) {
      out += ' ';
      out += detail::format_coord(atom.position[c]);
    }
  }
  return out;
}

// Parses a mode file against the molecule that owns it; the atom counts must
// agree or displacement vectors would be meaningless.
inline ModeSet parse_modes(std::string_view text, const Molecule& owner) {
  using namespace detail;
  std::vector<Line> lines;
  for (const auto& ln : split_lines(text)) {
    if (ln.text.empty()) continue;
    auto first = ln.text.find_first_not_of(" \t");
    if (first == std::string_view::npos || ln.text[first] == '#') continue;
    lines.push_back(ln);
  }
  if (lines.empty()) throw ParseError("empty modes input", 1);

  std::size_t cursor = 0;
  auto next_line = [&]() -> const Line& {
    if (cursor >= lines.size()) {
      int at = lines.back().number + 1;
      throw ParseError("unexpected end of input at line " + std::to_string(at), at);
    }
    return lines[cursor++];
  };

  const Line& header = next_line();
  auto htok = tokens(header.text);
  if (htok.size() != 3 || htok[0] != "MODES")
    throw ParseError("expected 'MODES <nmodes> <natoms>' at line " +
                         std::to_string(header.number),
                     header.number);
  long nmodes = parse_int(htok[1], header.number, "mode count");
  long natoms = parse_int(htok[2], header.number, "atom count");
  if (nmodes < 1)
    throw ParseError("mode count must be positive at line " +
                         std::to_string(header.number),
                     header.number);
  if (natoms != owner.natoms())
    throw ParseError("atom count mismatch: modes declare " + std::to_string(natoms) +
                         " atoms, molecule '" + owner.name + "' has " +
                         std::to_string(owner.natoms()),
                     header.number);
  if (nmodes > 3 * natoms)
    throw ParseError("mode count " + std::to_string(nmodes) + " exceeds 3N for " +
                         std::to_string(natoms) + " atoms",
                     header.number);

  ModeSet set;
  set.molecule_name = owner.name;
  set.modes.reserve(static_cast<std::size_t>(nmodes));
  for (long m = 0; m < nmodes; ++m) {
    const Line& mh = next_line();
    auto mt = tokens(mh.text);
    if (mt.size() != 5 || mt[0] != "MODE")
      throw ParseError("expected 'MODE <index> <freq> <redmass> <k>' at line " +
                           std::to_string(mh.number),
                       mh.number);
    long index = parse_int(mt[1], mh.number, "mode index");
    if (index != m + 1)
      throw ParseError("mode index " + std::to_string(index) + " out of order at line " +
                           std::to_string(mh.number) + " (expected " +
                           std::to_string(m + 1) + ")",
                       mh.number);
    VibrationalMode mode;
    mode.frequency_cm1 = parse_real(mt[2], mh.number, "frequency");
    mode.reduced_mass_amu = parse_real(mt[3], mh.number, "reduced mass");
    mode.force_constant = parse_real(mt[4], mh.number, "force constant");
    if (mode.frequency_cm1 <= 0.0)
      throw ParseError("imaginary or zero frequency " + std::string(mt[2]) +
                           " rejected at line " + std::to_string(mh.number),
                       mh.number);
    if (mode.reduced_mass_amu <= 0.0)
      throw ParseError("reduced mass must be positive at line " +
                           std::to_string(mh.number),
                       mh.number);
    if (mode.force_constant <= 0.0)
      throw ParseError("force constant must be positive at line " +
                           std::to_string(mh.number),
                       mh.number);

    mode.displacements.reserve(static_cast<std::size_t>(natoms));
    double norm_sq = 0.0;
    for (long a = 0; a < natoms; ++a) {
      const Line& dl = next_line();
      auto dt = tokens(dl.text);
      if (dt.size() != 3)
        throw ParseError("malformed displacement line at line " +
                             std::to_string(dl.number),
                         dl.number);
      Eigen::Vector3d d{parse_real(dt[0], dl.number, "displacement"),
                        parse_real(dt[1], dl.number, "displacement"),
                        parse_real(dt[2], dl.number, "displacement")};
      norm_sq += d.squaredNorm();
      mode.displacements.push_back(d);
    }
    double norm = std::sqrt(norm_sq);
    if (norm <= 1e-12)
      throw ParseError("zero displacement vector in mode " + std::to_string(m + 1),
                       mh.number);
    if (std::abs(norm - 1.0) > 1e-12)
      for (auto& d : mode.displacements) d /= norm;
    set.modes.push_back(std::move(mode));
  }
  if (cursor != lines.size())
    throw ParseError("trailing content at line " + std::to_string(lines[cursor].number),
                     lines[cursor].number);
  return set;
}

inline std::string serialize_modes(const ModeSet& set) {
  using detail::format_value;
  int natoms = set.modes.empty()
                   ? 0
                   : static_cast<int>(set.modes.front().displacements.size());
  std::string out = "MODES " + std::to_string(set.nmodes()) + ' ' +
                    std::to_string(natoms) + '\n';
  int index = 1;
  for (const auto& mode : set.modes) {
    out += "MODE " + std::to_string(index++) + ' ' +
           format_value(mode.frequency_cm1) + ' ' +
           format_value(mode.reduced_mass_amu) + ' ' +
           format_value(mode.force_constant) + '\n';
    for (const auto& d : mode.displacements)
      out += format_value(d.x()) + std::string(" ") + format_value(d.y()) + ' ' +
             format_value(d.z()) + '\n';
  }
  return out;
}

inline double molecular_mass(const Molecule& mol) {
  double total = 0.0;
  for (const auto& atom : mol.atoms) total += atom.mass;
  return total;
}

inline double mean_pairwise_distance(const Molecule& mol) {
  const int n = mol.natoms();
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      sum += (mol.atoms[i].position - mol.atoms[j].position).norm();
  return sum / (0.5 * n * (n - 1));
}

}  // namespace vibraug::chemio
