#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "vibraug/chemio.hpp"
#include "vibraug/error.hpp"
#include "vibraug/featurize.hpp"
#include "vibraug/fileio.hpp"
#include "vibraug/fixtures.hpp"
#include "vibraug/rng.hpp"
#include "vibraug/vibration.hpp"

// Record sets for interfacial-polymerization experiments, with the three
// operations the study pipeline needs: a seeded train/test split, thermal
// augmentation of the training side, and a synthetic benchmark generator.
//
// Datasets carry a provenance tag (raw / augmented / synthetic) that is
// persisted as a '# provenance=...' comment line ahead of the CSV header.
// Evaluation refuses augmented data; that check lives with the callers, the
// tag here just makes it possible.
//
// CSV schema (no quoting; ids and paths must not contain commas):
//   id,aq_conc,org_conc,pressure,substrate,monomer_a_xyz,monomer_a_modes,
//   monomer_b_xyz,monomer_b_modes,rejection,flux
// Geometry cells are paths relative to the CSV location; mode cells may be
// empty. save_csv writes content-addressed files under assets/ next to the
// CSV, so duplicated molecules are stored once.

namespace vibraug::dataset {

enum class Provenance { raw, augmented, synthetic };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::raw: return "raw";
    case Provenance::augmented: return "augmented";
    case Provenance::synthetic: return "synthetic";
  }
  throw Error("invalid provenance");
}

inline Provenance provenance_from_string(std::string_view s) {
  if (s == "raw") return Provenance::raw;
  if (s == "augmented") return Provenance::augmented;
  if (s == "synthetic") return Provenance::synthetic;
  throw Error("unknown provenance '" + std::string(s) + "'");
}

struct MembraneRecord {
  std::string id;
  featurize::Conditions conditions;
  chemio::Molecule monomer_a;
  chemio::Molecule monomer_b;
  std::shared_ptr<const chemio::ModeSet> modes_a;  // may be null
  std::shared_ptr<const chemio::ModeSet> modes_b;
  double rejection = 0.0;  // fraction in [0, 1]
  double flux = 0.0;       // L m^-2 h^-1, >= 0
};

struct Dataset {
  std::vector<MembraneRecord> records;
  Provenance provenance = Provenance::raw;

  int size() const { return static_cast<int>(records.size()); }

  void validate() const {
    std::map<std::string_view, int> seen;
    int row = 0;
    for (const auto& rec : records) {
      ++row;
      if (rec.id.empty()) throw Error("record " + std::to_string(row) + " has empty id");
      if (auto [it, inserted] = seen.emplace(rec.id, row); !inserted)
        throw Error("duplicate record id '" + rec.id + "'");
      rec.conditions.validate();
      if (!(rec.rejection >= 0.0 && rec.rejection <= 1.0))
        throw Error("rejection out of [0,1] for record '" + rec.id + "'");
      if (!(rec.flux >= 0.0) || !std::isfinite(rec.flux))
        throw Error("flux must be finite and >= 0 for record '" + rec.id + "'");
      if (rec.monomer_a.atoms.empty() || rec.monomer_b.atoms.empty())
        throw Error("record '" + rec.id + "' is missing monomer geometry");
    }
  }
};

inline featurize::FeatureVector encode_record(
    const MembraneRecord& rec,
    featurize::AtomScalar scalar = featurize::AtomScalar::mass) {
  return featurize::encode(rec.conditions, rec.monomer_a, rec.monomer_b, scalar);
}

struct SplitSpec {
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
};

// Seeded shuffle split. Records keep their original relative order inside
// each half; every record lands in exactly one half.
inline std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec) {
  const int n = ds.size();
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw Error("train_fraction must lie strictly between 0 and 1");
  const int n_train = static_cast<int>(std::llround(spec.train_fraction * n));
  if (n_train < 1 || n_train >= n)
    throw Error("split would leave an empty train or test side");

  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  RngStream rng(spec.seed, streams::split);
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }

  std::vector<int> train_idx(order.begin(), order.begin() + n_train);
  std::vector<int> test_idx(order.begin() + n_train, order.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  Dataset train, test;
  train.provenance = ds.provenance;
  test.provenance = ds.provenance;
  train.records.reserve(train_idx.size());
  test.records.reserve(test_idx.size());
  for (int i : train_idx) train.records.push_back(ds.records[static_cast<std::size_t>(i)]);
  for (int i : test_idx) test.records.push_back(ds.records[static_cast<std::size_t>(i)]);
  return {std::move(train), std::move(test)};
}

namespace detail {
constexpr std::uint32_t kMaxAugmentCopies = (1u << 24) - 1;

inline RngStream augment_stream(std::uint64_t seed, std::uint32_t record_index,
                                std::uint32_t copy_index) {
  const std::uint64_t id = streams::augment |
                           (static_cast<std::uint64_t>(record_index) << 24) |
                           copy_index;
  return RngStream(seed, id);
}
}  // namespace detail

// Perturbed monomer pair for copy `copy_index` (>= 1) of record
// `record_index`. Both the batch augmenter and the streaming featurizer in
// the experiment runner go through here, so the two always agree bit for bit.
inline std::pair<chemio::Molecule, chemio::Molecule> augmented_geometry(
    const MembraneRecord& rec, std::uint32_t record_index, std::uint32_t copy_index,
    const vibration::VibrationConfig& cfg, std::uint64_t seed) {
  RngStream rng = detail::augment_stream(seed, record_index, copy_index);
  chemio::Molecule a = rec.modes_a
                           ? vibration::perturb(rec.monomer_a, *rec.modes_a, cfg, rng)
                           : vibration::perturb_isotropic(rec.monomer_a, cfg, rng);
  chemio::Molecule b = rec.modes_b
                           ? vibration::perturb(rec.monomer_b, *rec.modes_b, cfg, rng)
                           : vibration::perturb_isotropic(rec.monomer_b, cfg, rng);
  return {std::move(a), std::move(b)};
}

// Expands every record into `factor` records: the untouched original plus
// factor-1 thermally perturbed copies. Conditions and labels are carried
// over unchanged; the copies keep pointing at the parent's mode data.
inline Dataset augment(const Dataset& train, int factor,
                       const vibration::VibrationConfig& cfg, std::uint64_t seed) {
  if (train.provenance == Provenance::augmented)
    throw Error("dataset is already augmented");
  if (factor < 1) throw Error("augmentation factor must be >= 1");
  if (static_cast<std::uint32_t>(factor) > detail::kMaxAugmentCopies)
    throw Error("augmentation factor too large");
  cfg.validate();

  Dataset out;
  out.provenance = Provenance::augmented;
  out.records.reserve(static_cast<std::size_t>(train.size()) *
                      static_cast<std::size_t>(factor));
  for (std::uint32_t r = 0; r < static_cast<std::uint32_t>(train.size()); ++r) {
    const MembraneRecord& rec = train.records[r];
    out.records.push_back(rec);
    for (std::uint32_t c = 1; c < static_cast<std::uint32_t>(factor); ++c) {
      MembraneRecord copy = rec;
      copy.id = rec.id + "-aug" + std::to_string(c);
      auto [a, b] = augmented_geometry(rec, r, c, cfg, seed);
      copy.monomer_a = std::move(a);
      copy.monomer_b = std::move(b);
      out.records.push_back(std::move(copy));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic benchmark.
//
// Records pair a randomly oriented amine-side monomer with an acyl-side one
// under random process conditions. Labels come from a smooth ground truth of
// the conditions and two orientation-invariant geometry summaries (mean
// pairwise distance, molecular mass), plus small Gaussian noise, so that a
// fraction of the variance is only reachable through the geometry channel.

namespace detail {

inline Eigen::Matrix3d random_rotation(RngStream& rng) {
  double q[4];
  double norm_sq;
  do {
    norm_sq = 0.0;
    for (double& c : q) {
      c = rng.normal(0.0, 1.0);
      norm_sq += c * c;
    }
  } while (norm_sq < 1e-12);
  const double inv = 1.0 / std::sqrt(norm_sq);
  const double w = q[0] * inv, x = q[1] * inv, y = q[2] * inv, z = q[3] * inv;
  Eigen::Matrix3d r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

inline void rotate_in_place(chemio::Molecule& mol, const Eigen::Matrix3d& r) {
  for (auto& atom : mol.atoms) atom.position = r * atom.position;
}

inline chemio::ModeSet rotated_modes(const chemio::ModeSet& set,
                                     const Eigen::Matrix3d& r) {
  chemio::ModeSet out = set;
  for (auto& mode : out.modes)
    for (auto& d : mode.displacements) d = r * d;
  return out;
}

inline double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

struct GroundTruthInputs {
  double aq, org, logp, sub, da, db, ma, mb;
};

inline GroundTruthInputs ground_truth_inputs(const featurize::Conditions& cond,
                                             const chemio::Molecule& a,
                                             const chemio::Molecule& b) {
  GroundTruthInputs g;
  g.aq = cond.aqueous_conc - 1.025;
  g.org = cond.organic_conc - 1.025;
  g.logp = std::log(cond.pressure_bar / 6.32);
  g.sub = static_cast<double>(cond.substrate) - 1.0;
  g.da = chemio::mean_pairwise_distance(a) - 1.7;
  g.db = chemio::mean_pairwise_distance(b) - 1.45;
  g.ma = (chemio::molecular_mass(a) - 46.4) / 40.0;
  g.mb = (chemio::molecular_mass(b) - 48.3) / 40.0;
  return g;
}

}  // namespace detail

inline double synth_rejection_clean(const featurize::Conditions& cond,
                                    const chemio::Molecule& a,
                                    const chemio::Molecule& b) {
  const auto g = detail::ground_truth_inputs(cond, a, b);
  const double u = 0.50 * g.aq - 0.42 * g.org + 0.36 * g.logp + 0.14 * g.sub +
                   0.34 * g.da + 0.30 * g.db + 0.22 * g.ma - 0.18 * g.mb +
                   0.28 * g.aq * g.da;
  return detail::clamp01(0.55 + 0.40 * std::tanh(u));
}

inline double synth_flux_clean(const featurize::Conditions& cond,
                               const chemio::Molecule& a,
                               const chemio::Molecule& b) {
  const auto g = detail::ground_truth_inputs(cond, a, b);
  const double v = -0.55 * g.aq + 0.38 * g.org + 0.52 * g.logp - 0.10 * g.sub -
                   0.26 * g.da + 0.24 * g.db - 0.16 * g.ma + 0.20 * g.mb +
                   0.22 * g.org * g.db;
  return 42.0 * (1.0 + 0.70 * std::tanh(v));
}

constexpr double kSynthRejectionNoise = 0.02;
constexpr double kSynthFluxNoise = 0.8;

inline Dataset synth_generate(int n, std::uint64_t seed) {
  if (n < 10) throw Error("synthetic benchmark needs at least 10 records");

  struct PoolEntry {
    chemio::Molecule mol;
    std::shared_ptr<const chemio::ModeSet> modes;
  };
  auto load_pool = [](std::span<const char* const> names) {
    std::vector<PoolEntry> pool;
    for (const char* name : names)
      pool.push_back({fixtures::molecule(name), fixtures::modes(name)});
    return pool;
  };
  const auto amine_pool = load_pool(fixtures::kAminePool);
  const auto acyl_pool = load_pool(fixtures::kAcylPool);

  Dataset out;
  out.provenance = Provenance::synthetic;
  out.records.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    RngStream rng(seed, streams::synth | static_cast<std::uint64_t>(i));

    const auto& pick_a = amine_pool[rng.uniform_int(amine_pool.size())];
    const auto& pick_b = acyl_pool[rng.uniform_int(acyl_pool.size())];
    const Eigen::Matrix3d rot_a = detail::random_rotation(rng);
    const Eigen::Matrix3d rot_b = detail::random_rotation(rng);

    MembraneRecord rec;
    char id[24];
    std::snprintf(id, sizeof id, "synth-%06d", i + 1);
    rec.id = id;
    rec.monomer_a = pick_a.mol;
    detail::rotate_in_place(rec.monomer_a, rot_a);
    rec.modes_a = std::make_shared<const chemio::ModeSet>(
        detail::rotated_modes(*pick_a.modes, rot_a));
    rec.monomer_b = pick_b.mol;
    detail::rotate_in_place(rec.monomer_b, rot_b);
    rec.modes_b = std::make_shared<const chemio::ModeSet>(
        detail::rotated_modes(*pick_b.modes, rot_b));

    rec.conditions.aqueous_conc = rng.uniform(0.05, 2.0);
    rec.conditions.organic_conc = rng.uniform(0.05, 2.0);
    rec.conditions.pressure_bar = rng.uniform(2.0, 20.0);
    rec.conditions.substrate = static_cast<int>(rng.uniform_int(3));

    rec.rejection = detail::clamp01(
        synth_rejection_clean(rec.conditions, rec.monomer_a, rec.monomer_b) +
        rng.normal(0.0, kSynthRejectionNoise));
    rec.flux = std::max(
        0.0, synth_flux_clean(rec.conditions, rec.monomer_a, rec.monomer_b) +
                 rng.normal(0.0, kSynthFluxNoise));
    out.records.push_back(std::move(rec));
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV persistence.

namespace detail {

inline constexpr const char* kCsvHeader =
    "id,aq_conc,org_conc,pressure,substrate,monomer_a_xyz,monomer_a_modes,"
    "monomer_b_xyz,monomer_b_modes,rejection,flux";

inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string content_name(std::string_view content, const char* ext) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "assets/a%016llx.%s",
                static_cast<unsigned long long>(fnv1a(content)), ext);
  return buf;
}

inline void check_csv_safe(const std::string& s, const char* what) {
  if (s.find(',') != std::string::npos || s.find('\n') != std::string::npos ||
      s.find('\r') != std::string::npos)
    throw Error(std::string(what) + " '" + s + "' contains characters not allowed in csv");
}

inline std::vector<std::string_view> split_csv_row(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t pos = 0;
  for (;;) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(pos));
      break;
    }
    cells.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return cells;
}

}  // namespace detail

inline void save_csv(const Dataset& ds, const std::filesystem::path& csv_path) {
  ds.validate();
  const std::filesystem::path dir =
      csv_path.has_parent_path() ? csv_path.parent_path() : std::filesystem::path(".");

  // Content-addressed asset store; identical molecules share one file.
  std::map<std::string, std::string> written;  // relative name -> content
  auto store = [&](const std::string& content, const char* ext) {
    std::string name = detail::content_name(content, ext);
    auto [it, inserted] = written.emplace(name, content);
    if (!inserted && it->second != content)
      throw Error("asset hash collision on '" + name + "'");
    return name;
  };

  std::string csv = "# provenance=";
  csv += to_string(ds.provenance);
  csv += '\n';
  csv += detail::kCsvHeader;
  csv += '\n';
  char buf[40];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& rec : ds.records) {
    detail::check_csv_safe(rec.id, "record id");
    const std::string a_xyz = store(chemio::serialize_xyz(rec.monomer_a), "xyz");
    const std::string b_xyz = store(chemio::serialize_xyz(rec.monomer_b), "xyz");
    const std::string a_modes =
        rec.modes_a ? store(chemio::serialize_modes(*rec.modes_a), "modes") : "";
    const std::string b_modes =
        rec.modes_b ? store(chemio::serialize_modes(*rec.modes_b), "modes") : "";
    csv += rec.id;
    csv += ',' + num(rec.conditions.aqueous_conc);
    csv += ',' + num(rec.conditions.organic_conc);
    csv += ',' + num(rec.conditions.pressure_bar);
    csv += ',' + std::to_string(rec.conditions.substrate);
    csv += ',' + a_xyz + ',' + a_modes + ',' + b_xyz + ',' + b_modes;
    csv += ',' + num(rec.rejection);
    csv += ',' + num(rec.flux);
    csv += '\n';
  }

  for (const auto& [name, content] : written) write_file(dir / name, content);
  write_file(csv_path, csv);
}

inline Dataset load_csv(const std::filesystem::path& csv_path) {
  const std::string text = read_file(csv_path);
  const std::filesystem::path dir =
      csv_path.has_parent_path() ? csv_path.parent_path() : std::filesystem::path(".");
  auto lines = chemio::detail::split_lines(text);

  Dataset ds;
  std::size_t cursor = 0;
  // Leading comment lines may carry metadata; only provenance is understood.
  while (cursor < lines.size() && !lines[cursor].text.empty() &&
         lines[cursor].text.front() == '#') {
    std::string_view body = lines[cursor].text.substr(1);
    while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
    if (body.rfind("provenance=", 0) == 0)
      ds.provenance = provenance_from_string(body.substr(11));
    ++cursor;
  }
  if (cursor >= lines.size() || lines[cursor].text != detail::kCsvHeader)
    throw ParseError("missing or malformed csv header at line " +
                         std::to_string(cursor + 1),
                     static_cast<int>(cursor + 1));
  ++cursor;

  std::map<std::string, chemio::Molecule> mol_cache;
  std::map<std::string, std::shared_ptr<const chemio::ModeSet>> modes_cache;

  auto load_molecule = [&](std::string_view rel, int line) -> const chemio::Molecule& {
    std::string key(rel);
    if (auto it = mol_cache.find(key); it != mol_cache.end()) return it->second;
    std::string content;
    try {
      content = read_file(dir / key);
    } catch (const Error& e) {
      throw ParseError(std::string(e.what()) + " (line " + std::to_string(line) + ")",
                       line);
    }
    try {
      return mol_cache.emplace(key, chemio::parse_xyz(content)).first->second;
    } catch (const ParseError& e) {
      throw ParseError("in geometry file '" + key + "': " + e.what(), line);
    }
  };
  auto load_modeset = [&](std::string_view rel, const chemio::Molecule& owner,
                          int line) -> std::shared_ptr<const chemio::ModeSet> {
    std::string key(rel);
    if (auto it = modes_cache.find(key); it != modes_cache.end()) return it->second;
    std::string content;
    try {
      content = read_file(dir / key);
    } catch (const Error& e) {
      throw ParseError(std::string(e.what()) + " (line " + std::to_string(line) + ")",
                       line);
    }
    try {
      auto set = std::make_shared<const chemio::ModeSet>(
          chemio::parse_modes(content, owner));
      return modes_cache.emplace(key, set).first->second;
    } catch (const ParseError& e) {
      throw ParseError("in modes file '" + key + "': " + e.what(), line);
    }
  };

  for (; cursor < lines.size(); ++cursor) {
    const auto& ln = lines[cursor];
    if (ln.text.empty()) continue;
    auto cells = detail::split_csv_row(ln.text);
    if (cells.size() != 11)
      throw ParseError("expected 11 csv fields, found " + std::to_string(cells.size()) +
                           " at line " + std::to_string(ln.number),
                       ln.number);
    MembraneRecord rec;
    rec.id = std::string(cells[0]);
    rec.conditions.aqueous_conc =
        chemio::detail::parse_real(cells[1], ln.number, "aq_conc");
    rec.conditions.organic_conc =
        chemio::detail::parse_real(cells[2], ln.number, "org_conc");
    rec.conditions.pressure_bar =
        chemio::detail::parse_real(cells[3], ln.number, "pressure");
    rec.conditions.substrate = static_cast<int>(
        chemio::detail::parse_int(cells[4], ln.number, "substrate"));
    rec.monomer_a = load_molecule(cells[5], ln.number);
    if (!cells[6].empty()) rec.modes_a = load_modeset(cells[6], rec.monomer_a, ln.number);
    rec.monomer_b = load_molecule(cells[7], ln.number);
    if (!cells[8].empty()) rec.modes_b = load_modeset(cells[8], rec.monomer_b, ln.number);
    rec.rejection = chemio::detail::parse_real(cells[9], ln.number, "rejection");
    rec.flux = chemio::detail::parse_real(cells[10], ln.number, "flux");

    try {
      rec.conditions.validate();
      if (!(rec.rejection >= 0.0 && rec.rejection <= 1.0))
        throw Error("rejection out of [0,1]");
      if (!(rec.flux >= 0.0) || !std::isfinite(rec.flux))
        throw Error("flux must be finite and >= 0");
    } catch (const Error& e) {
      throw ParseError(std::string(e.what()) + " at line " + std::to_string(ln.number),
                       ln.number);
    }
    ds.records.push_back(std::move(rec));
  }
  ds.validate();
  return ds;
}

}  // namespace vibraug::dataset
