#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "vibraug/dataset.hpp"
#include "vibraug/error.hpp"
#include "vibraug/featurize.hpp"
#include "vibraug/fileio.hpp"
#include "vibraug/forest.hpp"
#include "vibraug/gbr.hpp"
#include "vibraug/metrics.hpp"
#include "vibraug/neuralnet.hpp"
#include "vibraug/svr.hpp"

// The comparison experiment: one raw dataset, one split, then every
// combination of target, model and augmentation factor trained and scored
// under identical hyperparameters. Augmented feature matrices are built up
// front on one thread (they own all the randomness); the cells themselves
// are pure functions of those matrices and can run on any number of worker
// threads without changing a byte of output.
//
// The flux target is min-max normalized with train-set bounds before
// training, and flux metrics are reported on that normalized scale; the
// rejection target is already a fraction and stays raw.

namespace vibraug::experiment {

struct DataConfig {
  std::string csv;  // empty: generate the seeded synthetic benchmark
  int synth_n = 100;
  std::uint64_t synth_seed = 42;
};

struct ExperimentConfig {
  DataConfig data;
  dataset::SplitSpec split;
  vibration::VibrationConfig vib;
  neuralnet::TrainConfig train;
  forest::ForestConfig forest_cfg;
  gbr::GbrConfig gbr_cfg;
  svr::SvrConfig svr_cfg;
  std::uint64_t augment_seed = 0;
  std::vector<int> factors{1, 10, 100, 1000};
  std::vector<std::string> targets{"rejection", "flux"};
  std::vector<std::string> models{"dnn", "rf", "svr", "gbr"};
  std::vector<int> hidden_dims{100, 20};
  std::filesystem::path out_dir = "out";
  int threads = 0;  // 0: hardware concurrency
  bool gnuplot = false;
  featurize::AtomScalar atom_scalar = featurize::AtomScalar::mass;

  void validate() const {
    if (factors.empty()) throw Error("factors must not be empty");
    for (std::size_t k = 0; k < factors.size(); ++k) {
      if (factors[k] < 1) throw Error("factors must be >= 1");
      if (k > 0 && factors[k] <= factors[k - 1])
        throw Error("factors must be sorted ascending without repeats");
    }
    if (targets.empty()) throw Error("targets must not be empty");
    for (const auto& t : targets)
      if (t != "rejection" && t != "flux") throw Error("unknown target '" + t + "'");
    if (models.empty()) throw Error("models must not be empty");
    for (const auto& m : models)
      if (m != "dnn" && m != "rf" && m != "svr" && m != "gbr")
        throw Error("unknown model '" + m + "'");
    for (int h : hidden_dims)
      if (h < 1) throw Error("hidden layer sizes must be positive");
    if (threads < 0) throw Error("threads must be >= 0");
    train.validate();
    forest_cfg.validate();
    gbr_cfg.validate();
    svr_cfg.validate();
    vib.validate();
  }

  // One seed to drive every stage; the purpose-tagged streams keep the
  // stages statistically independent of each other.
  void apply_master_seed(std::uint64_t s) {
    data.synth_seed = s;
    split.seed = s;
    augment_seed = s;
    train.seed = s;
    forest_cfg.seed = s;
    gbr_cfg.seed = s;
  }
};

struct CellResult {
  std::string target;
  std::string model;
  int factor = 1;
  long train_size = 0;
  std::optional<metrics::MetricReport> report;
  std::string status = "ok";
  std::vector<double> history;  // per-epoch or per-stage training mse
};

struct ExperimentResult {
  std::vector<CellResult> cells;  // ordered targets x models x factors
  int ok_count = 0;
  std::filesystem::path results_csv;
};

namespace detail {

struct FactorData {
  int factor = 1;
  Eigen::MatrixXd x_train;  // scaled
  Eigen::MatrixXd x_test;   // scaled with the same scaler
  // per target (indexed like ExperimentConfig::targets)
  std::vector<Eigen::VectorXd> y_train;
  std::vector<Eigen::VectorXd> y_test;
};

inline double label_of(const dataset::MembraneRecord& rec, const std::string& target) {
  return target == "rejection" ? rec.rejection : rec.flux;
}

// Feature matrix of the train split expanded by `factor`: the original
// record followed by its perturbed copies, bitwise the same geometry the
// batch augmenter would produce.
inline Eigen::MatrixXd augmented_features(const dataset::Dataset& train, int factor,
                                          const ExperimentConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(train.size());
  Eigen::MatrixXd x(n * factor, featurize::kFeatureDim);
  for (std::uint32_t r = 0; r < static_cast<std::uint32_t>(n); ++r) {
    const auto& rec = train.records[r];
    const Eigen::Index base = static_cast<Eigen::Index>(r) * factor;
    const featurize::FeatureVector row = dataset::encode_record(rec, cfg.atom_scalar);
    x.row(base) = Eigen::Map<const Eigen::RowVectorXd>(row.data(), featurize::kFeatureDim);
    for (std::uint32_t c = 1; c < static_cast<std::uint32_t>(factor); ++c) {
      auto [a, b] = dataset::augmented_geometry(rec, r, c, cfg.vib, cfg.augment_seed);
      const featurize::FeatureVector fv =
          featurize::encode(rec.conditions, a, b, cfg.atom_scalar);
      x.row(base + c) =
          Eigen::Map<const Eigen::RowVectorXd>(fv.data(), featurize::kFeatureDim);
    }
  }
  return x;
}

inline std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

inline std::string fixed4(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

}  // namespace detail

inline void run_cell(CellResult& cell, const detail::FactorData& fd,
                     std::size_t target_idx, const ExperimentConfig& cfg) {
  try {
    const Eigen::VectorXd& y_train = fd.y_train[target_idx];
    const Eigen::VectorXd& y_test = fd.y_test[target_idx];
    Eigen::VectorXd pred;
    if (cell.model == "dnn") {
      std::vector<int> dims{static_cast<int>(fd.x_train.cols())};
      dims.insert(dims.end(), cfg.hidden_dims.begin(), cfg.hidden_dims.end());
      dims.push_back(1);
      neuralnet::MlpModel net = neuralnet::init(dims, cfg.train.seed);
      neuralnet::TrainResult result =
          neuralnet::train(std::move(net), fd.x_train, y_train, cfg.train);
      cell.history = std::move(result.history);
      pred = neuralnet::predict(result.model, fd.x_test);
    } else if (cell.model == "rf") {
      const forest::ForestModel m = forest::fit_forest(fd.x_train, y_train, cfg.forest_cfg);
      pred = m.predict(fd.x_test);
    } else if (cell.model == "gbr") {
      gbr::GbrModel m = gbr::fit_gbr(fd.x_train, y_train, cfg.gbr_cfg);
      cell.history = std::move(m.train_mse);
      pred = m.predict(fd.x_test);
    } else {
      const svr::SvrModel m = svr::fit_svr(fd.x_train, y_train, cfg.svr_cfg);
      pred = m.predict(fd.x_test);
    }
    cell.report = metrics::evaluate(y_test, pred);
    cell.status = "ok";
  } catch (const std::exception& e) {
    cell.report.reset();
    cell.status = std::string("failed: ") + e.what();
  }
}

inline ExperimentResult run_compare(const ExperimentConfig& cfg) {
  cfg.validate();

  dataset::Dataset ds = cfg.data.csv.empty()
                            ? dataset::synth_generate(cfg.data.synth_n, cfg.data.synth_seed)
                            : dataset::load_csv(cfg.data.csv);
  if (ds.provenance == dataset::Provenance::augmented)
    throw LeakageError(
        "input dataset is augmented; the comparison must start from raw or "
        "synthetic records");
  ds.validate();

  auto [train_ds, test_ds] = dataset::split(ds, cfg.split);

  // Raw test features, shared by every factor before scaling.
  Eigen::MatrixXd x_test_raw(test_ds.size(), featurize::kFeatureDim);
  for (int r = 0; r < test_ds.size(); ++r) {
    const featurize::FeatureVector fv =
        dataset::encode_record(test_ds.records[static_cast<std::size_t>(r)],
                               cfg.atom_scalar);
    x_test_raw.row(r) =
        Eigen::Map<const Eigen::RowVectorXd>(fv.data(), featurize::kFeatureDim);
  }

  // Per-factor matrices and targets, built sequentially: all randomness in
  // the experiment lives here and in the model seeds, never in the workers.
  std::vector<detail::FactorData> factor_data(cfg.factors.size());
  for (std::size_t fi = 0; fi < cfg.factors.size(); ++fi) {
    detail::FactorData& fd = factor_data[fi];
    fd.factor = cfg.factors[fi];
    fd.x_train = detail::augmented_features(train_ds, fd.factor, cfg);
    const featurize::Scaler scaler = featurize::Scaler::fit(fd.x_train);
    scaler.transform_in_place(fd.x_train);
    fd.x_test = x_test_raw;
    scaler.transform_in_place(fd.x_test);

    fd.y_train.resize(cfg.targets.size());
    fd.y_test.resize(cfg.targets.size());
    for (std::size_t ti = 0; ti < cfg.targets.size(); ++ti) {
      const std::string& target = cfg.targets[ti];
      Eigen::VectorXd yt(fd.x_train.rows());
      for (int r = 0; r < train_ds.size(); ++r) {
        const double v =
            detail::label_of(train_ds.records[static_cast<std::size_t>(r)], target);
        yt.segment(static_cast<Eigen::Index>(r) * fd.factor, fd.factor).setConstant(v);
      }
      Eigen::VectorXd ye(test_ds.size());
      for (int r = 0; r < test_ds.size(); ++r)
        ye[r] = detail::label_of(test_ds.records[static_cast<std::size_t>(r)], target);
      if (target == "flux") {
        const double lo = yt.minCoeff();
        const double hi = yt.maxCoeff();
        if (hi > lo) {
          yt = (yt.array() - lo) / (hi - lo);
          ye = (ye.array() - lo) / (hi - lo);
        } else {
          yt.setZero();
          ye.setZero();
        }
      }
      fd.y_train[ti] = std::move(yt);
      fd.y_test[ti] = std::move(ye);
    }
  }

  // Result rows in reporting order.
  ExperimentResult result;
  struct CellRef {
    std::size_t cell;
    std::size_t factor_idx;
    std::size_t target_idx;
  };
  std::vector<CellRef> refs;
  for (std::size_t ti = 0; ti < cfg.targets.size(); ++ti)
    for (const auto& model : cfg.models)
      for (std::size_t fi = 0; fi < cfg.factors.size(); ++fi) {
        CellResult cell;
        cell.target = cfg.targets[ti];
        cell.model = model;
        cell.factor = cfg.factors[fi];
        cell.train_size = factor_data[fi].x_train.rows();
        refs.push_back({result.cells.size(), fi, ti});
        result.cells.push_back(std::move(cell));
      }

  // Longest jobs first so stragglers don't serialize the tail.
  std::vector<std::size_t> order(refs.size());
  for (std::size_t k = 0; k < refs.size(); ++k) order[k] = k;
  auto cost = [&](std::size_t k) {
    const CellResult& c = result.cells[refs[k].cell];
    const double weight = c.model == "rf" ? 5.0 : c.model == "dnn" ? 4.0 : c.model == "svr" ? 2.0 : 1.0;
    return weight * static_cast<double>(c.train_size);
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cost(a) > cost(b); });

  unsigned n_threads = cfg.threads > 0
                           ? static_cast<unsigned>(cfg.threads)
                           : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(order.size()));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= order.size()) break;
      const CellRef& ref = refs[order[k]];
      run_cell(result.cells[ref.cell], factor_data[ref.factor_idx], ref.target_idx, cfg);
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const auto& cell : result.cells)
    if (cell.status == "ok") ++result.ok_count;

  // results.csv
  std::string csv = "target,model,factor,train_size,pcc,r2,mre_percent,rmse,mse,n,status\n";
  for (const auto& cell : result.cells) {
    csv += cell.target + ',' + cell.model + ',' + std::to_string(cell.factor) + ',' +
           std::to_string(cell.train_size) + ',';
    if (cell.report) {
      const auto& r = *cell.report;
      csv += metrics::detail::num(r.pcc) + ',' + metrics::detail::num(r.r2) + ',' +
             metrics::detail::num(r.mre_percent) + ',' + metrics::detail::num(r.rmse) +
             ',' + metrics::detail::num(r.mse) + ',' + std::to_string(r.n);
    } else {
      csv += "nan,nan,nan,nan,nan,0";
    }
    csv += ',' + detail::csv_safe(cell.status) + '\n';
  }
  result.results_csv = cfg.out_dir / "results.csv";
  fileio::atomic_write_file(result.results_csv, csv);

  // Markdown summary per target: one table per metric, models as rows.
  for (const auto& target : cfg.targets) {
    std::string md = "# Comparison: " + target + "\n\n";
    if (target == "flux")
      md += "Metrics are on the min-max normalized flux scale (train-set bounds).\n\n";
    md += "Augmentation factor vs. training size:";
    for (std::size_t fi = 0; fi < cfg.factors.size(); ++fi)
      md += (fi ? "," : "") + std::string(" ") + std::to_string(cfg.factors[fi]) + " -> " +
            std::to_string(factor_data[fi].x_train.rows()) + " rows";
    md += "\n";

    const std::vector<std::pair<std::string, int>> metric_cols{
        {"pcc", 0}, {"r2", 1}, {"mre_percent", 2}, {"rmse", 3}};
    for (const auto& [metric, code] : metric_cols) {
      md += "\n## " + metric + "\n\n| model |";
      for (int f : cfg.factors) md += " n=" + std::to_string(f) + "x |";
      md += "\n|---|";
      for (std::size_t fi = 0; fi < cfg.factors.size(); ++fi) md += "---|";
      md += "\n";
      for (const auto& model : cfg.models) {
        md += "| " + model + " |";
        for (int f : cfg.factors) {
          const CellResult* found = nullptr;
          for (const auto& cell : result.cells)
            if (cell.target == target && cell.model == model && cell.factor == f)
              found = &cell;
          std::optional<double> v;
          if (found && found->report) {
            const auto& r = *found->report;
            v = code == 0 ? r.pcc
                          : code == 1 ? r.r2
                                      : code == 2 ? r.mre_percent
                                                  : std::optional<double>(r.rmse);
          }
          md += " " + detail::fixed4(v) + " |";
        }
        md += "\n";
      }
    }
    fileio::write_file(cfg.out_dir / ("summary_" + target + ".md"), md);
  }

  // Loss histories for the iterative models.
  for (const auto& cell : result.cells) {
    if (cell.history.empty()) continue;
    const bool stages = cell.model == "gbr";
    std::string h = stages ? "stage,mse\n" : "epoch,mse\n";
    for (std::size_t k = 0; k < cell.history.size(); ++k)
      h += std::to_string(k) + ',' + metrics::detail::num(cell.history[k]) + '\n';
    fileio::write_file(cfg.out_dir / ("history_" + cell.target + "_" + cell.model + "_f" +
                                      std::to_string(cell.factor) + ".csv"),
                       h);
  }

  // Plot-ready two-column data when asked.
  if (cfg.gnuplot) {
    for (const auto& target : cfg.targets)
      for (const auto& model : cfg.models) {
        std::string dat = "# factor r2\n";
        for (const auto& cell : result.cells) {
          if (cell.target != target || cell.model != model || !cell.report) continue;
          if (!cell.report->r2) continue;
          dat += std::to_string(cell.factor) + ' ' +
                 metrics::detail::num(*cell.report->r2) + '\n';
        }
        fileio::write_file(cfg.out_dir / (target + "_" + model + "_r2.dat"), dat);
      }
  }

  // Configuration echo.
  {
    using metrics::detail::num;
    std::string j = "{\n";
    j += "  \"data\": {";
    if (cfg.data.csv.empty())
      j += "\"synth_n\": " + std::to_string(cfg.data.synth_n) +
           ", \"synth_seed\": " + std::to_string(cfg.data.synth_seed);
    else
      j += "\"csv\": \"" + cfg.data.csv + "\"";
    j += "},\n";
    j += "  \"split\": {\"train_fraction\": " + num(cfg.split.train_fraction) +
         ", \"seed\": " + std::to_string(cfg.split.seed) + "},\n";
    j += "  \"augment_seed\": " + std::to_string(cfg.augment_seed) + ",\n";
    j += "  \"vibration\": {\"temperature_k\": " + num(cfg.vib.temperature_k) +
         ", \"sigma_fraction\": " + num(cfg.vib.sigma_fraction) +
         ", \"modes_per_sample\": " + std::to_string(cfg.vib.modes_per_sample) +
         ", \"fallback_sigma\": " + num(cfg.vib.fallback_sigma) + "},\n";
    j += "  \"train\": {\"learning_rate\": " + num(cfg.train.learning_rate) +
         ", \"batch_size\": " + std::to_string(cfg.train.batch_size) +
         ", \"epochs\": " + std::to_string(cfg.train.epochs) +
         ", \"seed\": " + std::to_string(cfg.train.seed) + ", \"optimizer\": \"" +
         (cfg.train.optimizer == neuralnet::TrainConfig::Optimizer::adam ? "adam" : "sgd") +
         "\"},\n";
    j += "  \"hidden_dims\": [";
    for (std::size_t k = 0; k < cfg.hidden_dims.size(); ++k)
      j += (k ? ", " : "") + std::to_string(cfg.hidden_dims[k]);
    j += "],\n";
    j += "  \"forest\": {\"n_trees\": " + std::to_string(cfg.forest_cfg.n_trees) +
         ", \"features_per_split\": " + std::to_string(cfg.forest_cfg.features_per_split) +
         ", \"bootstrap\": " + (cfg.forest_cfg.bootstrap ? std::string("true") : "false") +
         ", \"seed\": " + std::to_string(cfg.forest_cfg.seed) + "},\n";
    j += "  \"gbr\": {\"n_stages\": " + std::to_string(cfg.gbr_cfg.n_stages) +
         ", \"learning_rate\": " + num(cfg.gbr_cfg.learning_rate) +
         ", \"max_depth\": " + std::to_string(cfg.gbr_cfg.max_depth) + "},\n";
    j += "  \"svr\": {\"c\": " + num(cfg.svr_cfg.c) +
         ", \"epsilon_tube\": " + num(cfg.svr_cfg.epsilon_tube) +
         ", \"gamma\": " + num(cfg.svr_cfg.gamma) + ", \"tol\": " + num(cfg.svr_cfg.tol) +
         ", \"max_iterations\": " + std::to_string(cfg.svr_cfg.max_iterations) + "},\n";
    j += "  \"factors\": [";
    for (std::size_t k = 0; k < cfg.factors.size(); ++k)
      j += (k ? ", " : "") + std::to_string(cfg.factors[k]);
    j += "],\n";
    j += "  \"targets\": [";
    for (std::size_t k = 0; k < cfg.targets.size(); ++k)
      j += (k ? ", " : "") + ("\"" + cfg.targets[k] + "\"");
    j += "],\n";
    j += "  \"models\": [";
    for (std::size_t k = 0; k < cfg.models.size(); ++k)
      j += (k ? ", " : "") + ("\"" + cfg.models[k] + "\"");
    j += "],\n";
    j += "  \"threads\": " + std::to_string(cfg.threads) + ",\n";
    j += "  \"atom_scalar\": \"" +
         std::string(cfg.atom_scalar == featurize::AtomScalar::mass ? "mass"
                                                                    : "atomic_number") +
         "\"\n";
    j += "}\n";
    fileio::write_file(cfg.out_dir / "run_config.json", j);
  }

  return result;
}

}  // namespace vibraug::experiment
