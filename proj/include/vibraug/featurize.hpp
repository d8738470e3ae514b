#pragma once

#include <Eigen/Core>
#include <array>
#include <charconv>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "vibraug/chemio.hpp"
#include "vibraug/error.hpp"

// Fixed-width descriptor for one membrane synthesis experiment.
//
// Layout (444 doubles):
//   [0]   aqueous-phase concentration (wt%)
//   [1]   organic-phase concentration (wt%)
//   [2]   operating pressure (bar)
//   [3]   substrate code
//   [4..223]   monomer A: 55 atom slots of (scalar, x, y, z)
//   [224..443] monomer B: same
// Unused atom slots stay zero. The atom scalar is the atomic mass by
// default; atomic number is available as a cheaper alternative. No frame
// canonicalization is applied: coordinates enter as stored.

namespace vibraug::featurize {

constexpr int kConditionDims = 4;
constexpr int kAtomSlots = 55;
constexpr int kAtomBlock = 4;
constexpr int kMonomerSpan = kAtomSlots * kAtomBlock;  // 220
constexpr int kFeatureDim = kConditionDims + 2 * kMonomerSpan;  // 444

enum class AtomScalar { mass, atomic_number };

struct Conditions {
  double aqueous_conc = 0.0;   // wt%
  double organic_conc = 0.0;   // wt%
  double pressure_bar = 0.0;
  int substrate = 0;  // 0 = PSf, 1 = PES, 2 = PAN

  void validate() const {
    if (!(aqueous_conc >= 0.0)) throw Error("aqueous concentration must be >= 0");
    if (!(organic_conc >= 0.0)) throw Error("organic concentration must be >= 0");
    if (!(pressure_bar > 0.0)) throw Error("pressure must be positive");
    if (substrate < 0 || substrate > 2)
      throw Error("substrate code must be 0, 1 or 2");
  }
};

using FeatureVector = std::array<double, kFeatureDim>;

namespace detail {
inline void write_monomer(FeatureVector& v, int base, const chemio::Molecule& mol,
                          AtomScalar scalar) {
  if (mol.natoms() > kAtomSlots)
    throw Error("monomer '" + mol.name + "' has " + std::to_string(mol.natoms()) +
                " atoms, limit is " + std::to_string(kAtomSlots));
  for (int a = 0; a < mol.natoms(); ++a) {
    const auto& atom = mol.atoms[static_cast<std::size_t>(a)];
    double s;
    if (scalar == AtomScalar::mass) {
      s = atom.mass;
    } else {
      const ElementInfo* elem = find_element(std::string_view(atom.element));
      if (!elem) throw Error("unknown element symbol '" + atom.element + "'");
      s = static_cast<double>(elem->atomic_number);
    }
    const int at = base + a * kAtomBlock;
    v[static_cast<std::size_t>(at)] = s;
    v[static_cast<std::size_t>(at) + 1] = atom.position.x();
    v[static_cast<std::size_t>(at) + 2] = atom.position.y();
    v[static_cast<std::size_t>(at) + 3] = atom.position.z();
  }
}
}  // namespace detail

inline FeatureVector encode(const Conditions& cond, const chemio::Molecule& monomer_a,
                            const chemio::Molecule& monomer_b,
                            AtomScalar scalar = AtomScalar::mass) {
  cond.validate();
  FeatureVector v{};
  v[0] = cond.aqueous_conc;
  v[1] = cond.organic_conc;
  v[2] = cond.pressure_bar;
  v[3] = static_cast<double>(cond.substrate);
  detail::write_monomer(v, kConditionDims, monomer_a, scalar);
  detail::write_monomer(v, kConditionDims + kMonomerSpan, monomer_b, scalar);
  return v;
}

// Per-dimension min-max map fitted on training rows only. Dimensions that
// never vary map to 0 so padding and one-hot constants drop out instead of
// dividing by zero. Values outside the fitted range extrapolate linearly.
class Scaler {
public:
  Scaler() = default;

  static Scaler fit(const Eigen::MatrixXd& rows) {
    if (rows.rows() < 1) throw Error("scaler needs at least one row");
    Scaler s;
    s.min_ = rows.colwise().minCoeff();
    s.max_ = rows.colwise().maxCoeff();
    return s;
  }

  int dims() const { return static_cast<int>(min_.size()); }

  double transform1(double value, int dim) const {
    const double lo = min_[dim], hi = max_[dim];
    if (hi <= lo) return 0.0;
    return (value - lo) / (hi - lo);
  }

  Eigen::VectorXd transform(const Eigen::VectorXd& v) const {
    check(static_cast<int>(v.size()));
    Eigen::VectorXd out(v.size());
    for (int d = 0; d < v.size(); ++d) out[d] = transform1(v[d], d);
    return out;
  }

  void transform_in_place(Eigen::MatrixXd& rows) const {
    check(static_cast<int>(rows.cols()));
    for (int d = 0; d < rows.cols(); ++d) {
      const double lo = min_[d], hi = max_[d];
      if (hi <= lo) {
        rows.col(d).setZero();
      } else {
        rows.col(d) = (rows.col(d).array() - lo) / (hi - lo);
      }
    }
  }

  const Eigen::VectorXd& mins() const { return min_; }
  const Eigen::VectorXd& maxs() const { return max_; }

  std::string serialize() const {
    std::string out = "dims " + std::to_string(dims()) + "\n";
    char buf[96];
    for (int d = 0; d < dims(); ++d) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g\n", min_[d], max_[d]);
      out += buf;
    }
    return out;
  }

  static Scaler deserialize(std::string_view text) {
    auto lines = chemio::detail::split_lines(text);
    if (lines.empty()) throw ParseError("empty scaler input", 1);
    auto head = chemio::detail::tokens(lines[0].text);
    if (head.size() != 2 || head[0] != "dims")
      throw ParseError("expected 'dims <n>' at line 1", 1);
    long n = chemio::detail::parse_int(head[1], 1, "dimension count");
    if (n < 1 || lines.size() != static_cast<std::size_t>(n) + 1)
      throw ParseError("scaler row count does not match declared dimensions", 1);
    Scaler s;
    s.min_.resize(n);
    s.max_.resize(n);
    for (long d = 0; d < n; ++d) {
      const auto& ln = lines[static_cast<std::size_t>(d) + 1];
      auto tk = chemio::detail::tokens(ln.text);
      if (tk.size() != 2)
        throw ParseError("malformed scaler line at line " + std::to_string(ln.number),
                         ln.number);
      s.min_[d] = chemio::detail::parse_real(tk[0], ln.number, "scaler min");
      s.max_[d] = chemio::detail::parse_real(tk[1], ln.number, "scaler max");
    }
    return s;
  }

private:
  void check(int d) const {
    if (d != dims()) throw Error("scaler dimension mismatch");
  }

  Eigen::VectorXd min_;
  Eigen::VectorXd max_;
};

inline Eigen::MatrixXd stack(std::span<const FeatureVector> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), kFeatureDim);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (int d = 0; d < kFeatureDim; ++d)
      m(i, d) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
  return m;
}

inline Scaler fit_scaler(std::span<const FeatureVector> rows) {
  return Scaler::fit(stack(rows));
}

inline FeatureVector transform(const Scaler& scaler, const FeatureVector& v) {
  if (scaler.dims() != kFeatureDim) throw Error("scaler dimension mismatch");
  FeatureVector out;
  for (int d = 0; d < kFeatureDim; ++d)
    out[static_cast<std::size_t>(d)] = scaler.transform1(v[static_cast<std::size_t>(d)], d);
  return out;
}

}  // namespace vibraug::featurize
