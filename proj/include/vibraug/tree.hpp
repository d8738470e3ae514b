#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "vibraug/error.hpp"
#include "vibraug/rng.hpp"

// Regression tree grown by exhaustive variance-reduction splitting. The
// builder works level by level: feature values are presorted once per data
// matrix (shareable across an ensemble), and every tree level costs one
// ordered sweep per candidate feature with running weighted sums. Candidate
// thresholds sit halfway between adjacent distinct values; ties in gain
// resolve to the lowest feature index, then the lowest threshold, so a fit
// is a pure function of its inputs.
//
// Columns with a single distinct value can never produce a boundary and are
// excluded from the presort up front. Ensemble feature subsets are still
// drawn over the full column range; drawing a constant column simply wastes
// the draw, exactly as scanning it would.

namespace vibraug::tree {

struct TreeConfig {
  int max_depth = 0;          // 0 means unlimited
  int min_leaf = 1;           // minimum weighted samples per side
  int features_per_split = 0; // 0 means all features

  void validate() const {
    if (max_depth < 0) throw Error("max_depth must be >= 0");
    if (min_leaf < 1) throw Error("min_leaf must be >= 1");
    if (features_per_split < 0) throw Error("features_per_split must be >= 0");
  }
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // weighted mean of the node's targets
};

struct Tree {
  std::vector<TreeNode> nodes;

  double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    int cur = 0;
    while (nodes[static_cast<std::size_t>(cur)].feature >= 0) {
      const TreeNode& nd = nodes[static_cast<std::size_t>(cur)];
      cur = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(cur)].value;
  }

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const {
    Eigen::VectorXd out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) out[i] = predict_row(x.row(i));
    return out;
  }
};

// Per-feature sample orderings, built once and shared by every tree fitted
// on the same matrix. Constant columns are left out.
struct Presort {
  int n = 0;
  int p = 0;
  std::vector<int> features;             // non-constant columns, ascending
  std::vector<std::vector<int>> order;   // per entry of features: sample ids
                                         // ascending by (value, id)
};

inline Presort build_presort(const Eigen::MatrixXd& x) {
  Presort ps;
  ps.n = static_cast<int>(x.rows());
  ps.p = static_cast<int>(x.cols());
  for (int d = 0; d < ps.p; ++d) {
    const auto col = x.col(d);
    if (ps.n > 0 && col.minCoeff() == col.maxCoeff()) continue;
    std::vector<int> idx(static_cast<std::size_t>(ps.n));
    for (int i = 0; i < ps.n; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::sort(idx.begin(), idx.end(), [&col](int a, int b) {
      if (col[a] != col[b]) return col[a] < col[b];
      return a < b;
    });
    ps.features.push_back(d);
    ps.order.push_back(std::move(idx));
  }
  return ps;
}

namespace detail {

// Draws k distinct values from [0, p) into the front of buf. The buffer is a
// persistent permutation of 0..p-1; any starting permutation yields a
// uniform sample, so it is never reset between calls.
inline void sample_features(std::vector<int>& buf, int k, RngStream& rng) {
  const int p = static_cast<int>(buf.size());
  for (int j = 0; j < k; ++j) {
    const int pick =
        j + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(p - j)));
    std::swap(buf[static_cast<std::size_t>(j)], buf[static_cast<std::size_t>(pick)]);
  }
}

}  // namespace detail

// Weighted least-squares tree fit. Weights are typically bootstrap counts;
// an empty vector means unit weight everywhere. The presort must come from
// the same matrix. rng is only touched when a proper feature subset is
// requested.
inline Tree fit_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const std::vector<double>& weights, const TreeConfig& cfg,
                     const Presort& presort, RngStream* rng = nullptr) {
  cfg.validate();
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  if (n == 0) throw Error("empty training set");
  if (y.size() != n) throw Error("targets do not match rows");
  if (presort.n != n || presort.p != p) throw Error("presort built for a different matrix");
  if (!weights.empty() && static_cast<int>(weights.size()) != n)
    throw Error("weights do not match rows");
  const bool subset = cfg.features_per_split > 0 && cfg.features_per_split < p;
  if (subset && rng == nullptr) throw Error("feature subsampling needs an rng");

  auto weight_of = [&weights](int i) {
    return weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i)];
  };

  Tree tree;
  std::vector<int> node_of(static_cast<std::size_t>(n), -1);

  // Root totals.
  double t_w0 = 0.0, t_s0 = 0.0;
  double ymin0 = std::numeric_limits<double>::infinity();
  double ymax0 = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double w = weight_of(i);
    if (w <= 0.0) continue;
    node_of[static_cast<std::size_t>(i)] = 0;
    t_w0 += w;
    t_s0 += w * y[i];
    ymin0 = std::min(ymin0, y[i]);
    ymax0 = std::max(ymax0, y[i]);
  }
  if (t_w0 <= 0.0) throw Error("no samples carry weight");

  tree.nodes.push_back(TreeNode{});
  std::vector<int> frontier{0};
  std::vector<double> t_w{t_w0}, t_s{t_s0}, ymin{ymin0}, ymax{ymax0};

  std::vector<int> feature_buf;
  if (subset) {
    feature_buf.resize(static_cast<std::size_t>(p));
    for (int d = 0; d < p; ++d) feature_buf[static_cast<std::size_t>(d)] = d;
  }

  const int n_presort = static_cast<int>(presort.features.size());
  std::vector<int> feature_pos(static_cast<std::size_t>(p), -1);
  for (int f = 0; f < n_presort; ++f)
    feature_pos[static_cast<std::size_t>(presort.features[static_cast<std::size_t>(f)])] = f;

  std::vector<int> slot_of_node;
  int depth = 0;

  while (!frontier.empty()) {
    const int n_slots = static_cast<int>(frontier.size());
    slot_of_node.assign(tree.nodes.size(), -1);
    for (int s = 0; s < n_slots; ++s)
      slot_of_node[static_cast<std::size_t>(frontier[static_cast<std::size_t>(s)])] = s;

    // Decide which slots still search for a split.
    std::vector<char> searching(static_cast<std::size_t>(n_slots), 0);
    bool any_search = false;
    for (int s = 0; s < n_slots; ++s) {
      const auto su = static_cast<std::size_t>(s);
      const bool depth_ok = cfg.max_depth == 0 || depth < cfg.max_depth;
      const bool impure = ymin[su] < ymax[su];
      const bool big_enough = t_w[su] >= 2.0 * cfg.min_leaf;
      if (depth_ok && impure && big_enough) {
        searching[su] = 1;
        any_search = true;
      }
    }

    // Candidate features per searching slot, as inverted per-feature lists.
    std::vector<std::vector<int>> feat_slots;
    if (any_search && subset) {
      feat_slots.assign(static_cast<std::size_t>(n_presort), {});
      for (int s = 0; s < n_slots; ++s) {
        if (!searching[static_cast<std::size_t>(s)]) continue;
        detail::sample_features(feature_buf, cfg.features_per_split, *rng);
        for (int j = 0; j < cfg.features_per_split; ++j) {
          const int f = feature_pos[static_cast<std::size_t>(
              feature_buf[static_cast<std::size_t>(j)])];
          if (f >= 0) feat_slots[static_cast<std::size_t>(f)].push_back(s);
        }
      }
      for (auto& v : feat_slots) std::sort(v.begin(), v.end());
    }

    std::vector<double> best_gain(static_cast<std::size_t>(n_slots), 0.0);
    std::vector<double> best_thr(static_cast<std::size_t>(n_slots), 0.0);
    std::vector<int> best_feat(static_cast<std::size_t>(n_slots), -1);

    if (any_search) {
      std::vector<double> l_w(static_cast<std::size_t>(n_slots));
      std::vector<double> l_s(static_cast<std::size_t>(n_slots));
      std::vector<double> prev(static_cast<std::size_t>(n_slots));
      std::vector<char> started(static_cast<std::size_t>(n_slots));
      std::vector<int> stamp(static_cast<std::size_t>(n_slots), -1);

      for (int f = 0; f < n_presort; ++f) {
        const int d = presort.features[static_cast<std::size_t>(f)];
        const std::vector<int>* slots = nullptr;
        if (subset) {
          slots = &feat_slots[static_cast<std::size_t>(f)];
          if (slots->empty()) continue;
          for (int s : *slots) {
            const auto su = static_cast<std::size_t>(s);
            stamp[su] = f;
            l_w[su] = 0.0;
            l_s[su] = 0.0;
            started[su] = 0;
          }
        } else {
          for (int s = 0; s < n_slots; ++s) {
            const auto su = static_cast<std::size_t>(s);
            if (!searching[su]) continue;
            stamp[su] = f;
            l_w[su] = 0.0;
            l_s[su] = 0.0;
            started[su] = 0;
          }
        }

        const auto col = x.col(d);
        for (int i : presort.order[static_cast<std::size_t>(f)]) {
          const int node = node_of[static_cast<std::size_t>(i)];
          if (node < 0) continue;
          const int s = slot_of_node[static_cast<std::size_t>(node)];
          if (s < 0) continue;
          const auto su = static_cast<std::size_t>(s);
          if (stamp[su] != f) continue;
          const double v = col[i];
          if (started[su] && v > prev[su]) {
            const double wl = l_w[su];
            const double wr = t_w[su] - wl;
            if (wl >= cfg.min_leaf && wr >= cfg.min_leaf) {
              const double sl = l_s[su];
              const double sr = t_s[su] - sl;
              const double gain =
                  sl * sl / wl + sr * sr / wr - t_s[su] * t_s[su] / t_w[su];
              if (gain > best_gain[su]) {
                double thr = prev[su] + (v - prev[su]) / 2.0;
                if (thr >= v) thr = prev[su];
                best_gain[su] = gain;
                best_thr[su] = thr;
                best_feat[su] = d;
              }
            }
          }
          const double w = weight_of(i);
          l_w[su] += w;
          l_s[su] += w * y[i];
          prev[su] = v;
          started[su] = 1;
        }
      }
    }

    // Materialize splits and build the next frontier.
    std::vector<int> next_frontier;
    std::vector<int> child_slot(static_cast<std::size_t>(n_slots), -1);
    for (int s = 0; s < n_slots; ++s) {
      const auto su = static_cast<std::size_t>(s);
      TreeNode& nd = tree.nodes[static_cast<std::size_t>(frontier[su])];
      nd.value = t_s[su] / t_w[su];
      if (best_feat[su] >= 0) {
        nd.feature = best_feat[su];
        nd.threshold = best_thr[su];
        nd.left = static_cast<int>(tree.nodes.size());
        nd.right = nd.left + 1;
        tree.nodes.push_back(TreeNode{});
        tree.nodes.push_back(TreeNode{});
        child_slot[su] = static_cast<int>(next_frontier.size());
        next_frontier.push_back(nd.left);
        next_frontier.push_back(nd.right);
      }
    }

    // Reassign samples and accumulate child statistics in ascending sample
    // order.
    const int n_children = static_cast<int>(next_frontier.size());
    std::vector<double> c_w(static_cast<std::size_t>(n_children), 0.0);
    std::vector<double> c_s(static_cast<std::size_t>(n_children), 0.0);
    std::vector<double> c_min(static_cast<std::size_t>(n_children),
                              std::numeric_limits<double>::infinity());
    std::vector<double> c_max(static_cast<std::size_t>(n_children),
                              -std::numeric_limits<double>::infinity());
    for (int i = 0; i < n; ++i) {
      const int node = node_of[static_cast<std::size_t>(i)];
      if (node < 0) continue;
      const int s = slot_of_node[static_cast<std::size_t>(node)];
      if (s < 0) continue;
      const auto su = static_cast<std::size_t>(s);
      if (child_slot[su] < 0) {
        node_of[static_cast<std::size_t>(i)] = -1;  // finished leaf
        continue;
      }
      const TreeNode& nd = tree.nodes[static_cast<std::size_t>(frontier[su])];
      const bool go_left = x(i, nd.feature) <= nd.threshold;
      const int cs = child_slot[su] + (go_left ? 0 : 1);
      const auto cu = static_cast<std::size_t>(cs);
      node_of[static_cast<std::size_t>(i)] =
          next_frontier[cu];
      const double w = weight_of(i);
      c_w[cu] += w;
      c_s[cu] += w * y[i];
      c_min[cu] = std::min(c_min[cu], y[i]);
      c_max[cu] = std::max(c_max[cu], y[i]);
    }

    frontier = std::move(next_frontier);
    t_w = std::move(c_w);
    t_s = std::move(c_s);
    ymin = std::move(c_min);
    ymax = std::move(c_max);
    ++depth;
  }

  return tree;
}

inline Tree fit_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const std::vector<double>& weights = {},
                     const TreeConfig& cfg = {}, RngStream* rng = nullptr) {
  const Presort presort = build_presort(x);
  return fit_tree(x, y, weights, cfg, presort, rng);
}

}  // namespace vibraug::tree
