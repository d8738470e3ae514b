#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "vibraug/error.hpp"
#include "vibraug/tree.hpp"

// Gradient-boosted regression: a constant baseline plus shallow trees fitted
// to the running residuals, each damped by the learning rate. With squared
// error the residual is the negative gradient, and every stage's leaf holds
// the residual mean of its samples, so for learning rates in (0, 2] the
// training mse can only go down; train_mse records it, baseline first. The
// fit is deterministic (no subsampling), the seed field is reserved.

namespace vibraug::gbr {

struct GbrConfig {
  int n_stages = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
  int min_leaf = 1;
  std::uint64_t seed = 0;  // reserved for stochastic variants; unused

  void validate() const {
    if (n_stages < 0) throw Error("n_stages must be >= 0");
    if (!(learning_rate > 0.0)) throw Error("learning_rate must be positive");
    if (max_depth < 0) throw Error("max_depth must be >= 0");
    if (min_leaf < 1) throw Error("min_leaf must be >= 1");
  }
};

struct GbrModel {
  double baseline = 0.0;
  double learning_rate = 0.1;
  std::vector<tree::Tree> trees;
  std::vector<double> train_mse;  // n_stages + 1 entries, baseline first
  int feature_dim = 0;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const {
    if (static_cast<int>(x.cols()) != feature_dim)
      throw Error("input dimension mismatch");
    Eigen::VectorXd out = Eigen::VectorXd::Constant(x.rows(), baseline);
    for (const auto& t : trees) out += learning_rate * t.predict(x);
    return out;
  }
};

inline GbrModel fit_gbr(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        const GbrConfig& cfg) {
  cfg.validate();
  const int n = static_cast<int>(x.rows());
  if (n == 0) throw Error("empty training set");
  if (y.size() != n) throw Error("targets do not match rows");

  GbrModel model;
  model.learning_rate = cfg.learning_rate;
  model.feature_dim = static_cast<int>(x.cols());
  model.baseline = y.sum() / static_cast<double>(n);
  model.trees.reserve(static_cast<std::size_t>(cfg.n_stages));
  model.train_mse.reserve(static_cast<std::size_t>(cfg.n_stages) + 1);

  const tree::Presort presort = tree::build_presort(x);
  tree::TreeConfig tc;
  tc.max_depth = cfg.max_depth;
  tc.min_leaf = cfg.min_leaf;

  Eigen::VectorXd residual = y.array() - model.baseline;
  model.train_mse.push_back(residual.squaredNorm() / static_cast<double>(n));
  for (int stage = 0; stage < cfg.n_stages; ++stage) {
    tree::Tree t = tree::fit_tree(x, residual, {}, tc, presort, nullptr);
    residual -= cfg.learning_rate * t.predict(x);
    model.train_mse.push_back(residual.squaredNorm() / static_cast<double>(n));
    model.trees.push_back(std::move(t));
  }
  return model;
}

}  // namespace vibraug::gbr
