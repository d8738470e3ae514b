#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "vibraug/error.hpp"
#include "vibraug/rng.hpp"
#include "vibraug/tree.hpp"

// Bagged regression forest: bootstrap-resampled trees grown to purity with a
// per-node random feature subset, averaged at prediction time. Each tree
// draws from its own stream keyed by the tree index, so tree t of a given
// seed is the same no matter how many trees are fitted or in what order.

namespace vibraug::forest {

struct ForestConfig {
  int n_trees = 100;
  int features_per_split = 0;  // 0 means ceil(p / 3)
  bool bootstrap = true;
  int min_leaf = 1;
  int max_depth = 0;  // 0 means unlimited
  std::uint64_t seed = 0;

  void validate() const {
    if (n_trees < 1) throw Error("n_trees must be >= 1");
    if (features_per_split < 0) throw Error("features_per_split must be >= 0");
    if (min_leaf < 1) throw Error("min_leaf must be >= 1");
    if (max_depth < 0) throw Error("max_depth must be >= 0");
  }
};

struct ForestModel {
  std::vector<tree::Tree> trees;
  int feature_dim = 0;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const {
    if (trees.empty()) throw Error("empty forest");
    if (static_cast<int>(x.cols()) != feature_dim)
      throw Error("input dimension mismatch");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(x.rows());
    for (const auto& t : trees) acc += t.predict(x);
    return acc / static_cast<double>(trees.size());
  }
};

inline ForestModel fit_forest(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              const ForestConfig& cfg) {
  cfg.validate();
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  if (n == 0) throw Error("empty training set");
  if (y.size() != n) throw Error("targets do not match rows");

  const tree::Presort presort = tree::build_presort(x);

  tree::TreeConfig tc;
  tc.max_depth = cfg.max_depth;
  tc.min_leaf = cfg.min_leaf;
  tc.features_per_split =
      cfg.features_per_split > 0 ? cfg.features_per_split : (p + 2) / 3;

  ForestModel model;
  model.feature_dim = p;
  model.trees.reserve(static_cast<std::size_t>(cfg.n_trees));
  std::vector<double> counts;
  for (int t = 0; t < cfg.n_trees; ++t) {
    RngStream rng(cfg.seed, streams::tree | static_cast<std::uint64_t>(t));
    if (cfg.bootstrap) {
      counts.assign(static_cast<std::size_t>(n), 0.0);
      for (int i = 0; i < n; ++i)
        counts[rng.uniform_int(static_cast<std::uint64_t>(n))] += 1.0;
    } else {
      counts.clear();
    }
    model.trees.push_back(tree::fit_tree(x, y, counts, tc, presort, &rng));
  }
  return model;
}

}  // namespace vibraug::forest
