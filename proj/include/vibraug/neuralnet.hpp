#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vibraug/error.hpp"
#include "vibraug/rng.hpp"

// Fully connected regression network: relu hidden layers, linear scalar
// output, squared-error loss, minibatch Adam or plain SGD. Everything is
// explicit here, gradients included; Eigen only supplies the matrix algebra.
//
// Training skips input columns that are identically zero. Their weights
// receive exactly zero gradient either way (and an Adam step on zero
// gradient with zero state is exactly zero), so the shortcut is invisible in
// the result; with min-max scaled padded descriptors it cuts most of the
// arithmetic.

namespace vibraug::neuralnet {

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 32;
  int epochs = 500;
  std::uint64_t seed = 0;
  enum class Optimizer { adam, sgd } optimizer = Optimizer::adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const {
    if (!(learning_rate > 0.0)) throw Error("learning_rate must be positive");
    if (batch_size < 1) throw Error("batch_size must be >= 1");
    if (epochs < 0) throw Error("epochs must be >= 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
      throw Error("adam betas must lie in [0,1)");
    if (!(epsilon > 0.0)) throw Error("adam epsilon must be positive");
  }
};

struct MlpModel {
  std::vector<int> dims;                  // e.g. {444, 100, 20, 1}
  std::vector<Eigen::MatrixXd> weights;   // per layer, (out x in)
  std::vector<Eigen::VectorXd> biases;
  std::string activation = "relu";

  int input_dim() const { return dims.empty() ? 0 : dims.front(); }
  int layers() const { return static_cast<int>(weights.size()); }
};

// He-initialized weights, zero biases.
inline MlpModel init(const std::vector<int>& dims, std::uint64_t seed) {
  if (dims.size() < 2) throw Error("network needs at least input and output dims");
  for (int d : dims)
    if (d < 1) throw Error("layer dims must be positive");
  if (dims.back() != 1) throw Error("output layer must have exactly one unit");

  MlpModel model;
  model.dims = dims;
  RngStream rng(seed, streams::init);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    const double sd = std::sqrt(2.0 / static_cast<double>(fan_in));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) w(r, c) = rng.normal(0.0, sd);
    model.weights.push_back(std::move(w));
    model.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return model;
}

inline double forward(const MlpModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.input_dim()) throw Error("input dimension mismatch");
  Eigen::VectorXd a = x;
  for (int l = 0; l < model.layers(); ++l) {
    Eigen::VectorXd z = model.weights[static_cast<std::size_t>(l)] * a +
                        model.biases[static_cast<std::size_t>(l)];
    if (l + 1 < model.layers()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a[0];
}

inline Eigen::VectorXd predict(const MlpModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.input_dim()) throw Error("input dimension mismatch");
  Eigen::MatrixXd a = x;
  for (int l = 0; l < model.layers(); ++l) {
    Eigen::MatrixXd z = (a * model.weights[static_cast<std::size_t>(l)].transpose())
                            .rowwise() +
                        model.biases[static_cast<std::size_t>(l)].transpose();
    if (l + 1 < model.layers()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a.col(0);
}

struct Gradients {
  std::vector<Eigen::MatrixXd> dw;
  std::vector<Eigen::VectorXd> db;
};

// Batch mean-squared-error and its gradient with respect to every parameter.
inline std::pair<double, Gradients> loss_and_gradients(const MlpModel& model,
                                                       const Eigen::MatrixXd& x,
                                                       const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) throw Error("batch size mismatch");
  if (x.cols() != model.input_dim()) throw Error("input dimension mismatch");
  if (x.rows() == 0) throw Error("empty batch");

  const int n_layers = model.layers();
  std::vector<Eigen::MatrixXd> acts;  // acts[l] feeds layer l
  acts.reserve(static_cast<std::size_t>(n_layers) + 1);
  acts.push_back(x);
  std::vector<Eigen::MatrixXd> zs;
  zs.reserve(static_cast<std::size_t>(n_layers));
  for (int l = 0; l < n_layers; ++l) {
    Eigen::MatrixXd z =
        (acts.back() * model.weights[static_cast<std::size_t>(l)].transpose())
            .rowwise() +
        model.biases[static_cast<std::size_t>(l)].transpose();
    zs.push_back(z);
    if (l + 1 < n_layers) z = z.cwiseMax(0.0);
    acts.push_back(std::move(z));
  }

  const double inv_n = 1.0 / static_cast<double>(x.rows());
  Eigen::VectorXd residual = acts.back().col(0) - y;
  const double mse = residual.squaredNorm() * inv_n;

  Gradients grads;
  grads.dw.resize(static_cast<std::size_t>(n_layers));
  grads.db.resize(static_cast<std::size_t>(n_layers));
  Eigen::MatrixXd dz = (2.0 * inv_n) * residual;
  for (int l = n_layers - 1; l >= 0; --l) {
    const auto lu = static_cast<std::size_t>(l);
    grads.dw[lu].noalias() = dz.transpose() * acts[lu];
    grads.db[lu] = dz.colwise().sum().transpose();
    if (l > 0) {
      Eigen::MatrixXd da = dz * model.weights[lu];
      dz = da.cwiseProduct((zs[lu - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return {mse, std::move(grads)};
}

struct TrainResult {
  MlpModel model;
  std::vector<double> history;  // mean training mse per epoch
};

namespace detail {

struct AdamState {
  std::vector<Eigen::MatrixXd> mw, vw;
  std::vector<Eigen::VectorXd> mb, vb;
  long t = 0;
};

}  // namespace detail

// Minibatch training. The incoming model supplies the initial parameters and
// is returned updated; the history holds one mean train-set mse per epoch.
// A non-finite epoch loss aborts with NumericError.
inline TrainResult train(MlpModel model, const Eigen::MatrixXd& x,
                         const Eigen::VectorXd& y, const TrainConfig& cfg) {
  cfg.validate();
  if (x.rows() != y.size()) throw Error("training rows do not match targets");
  if (x.rows() == 0) throw Error("empty training set");
  if (x.cols() != model.input_dim()) throw Error("input dimension mismatch");

  const Eigen::Index n = x.rows();
  const int full_dim = model.input_dim();

  // Columns with any nonzero entry take part in training; the rest provably
  // keep their initial weights.
  std::vector<int> active;
  active.reserve(static_cast<std::size_t>(full_dim));
  for (int d = 0; d < full_dim; ++d)
    if ((x.col(d).array() != 0.0).any()) active.push_back(d);
  const int k = static_cast<int>(active.size());
  const bool compressed = k < full_dim;

  Eigen::MatrixXd xc;
  if (compressed) {
    xc.resize(n, k);
    for (int j = 0; j < k; ++j) xc.col(j) = x.col(active[static_cast<std::size_t>(j)]);
  }
  const Eigen::MatrixXd& xt = compressed ? xc : x;

  // Working copies of the parameters, first layer compressed to active
  // columns when applicable.
  std::vector<Eigen::MatrixXd> w(model.weights.begin(), model.weights.end());
  std::vector<Eigen::VectorXd> b(model.biases.begin(), model.biases.end());
  if (compressed) {
    Eigen::MatrixXd w0(w[0].rows(), k);
    for (int j = 0; j < k; ++j) w0.col(j) = w[0].col(active[static_cast<std::size_t>(j)]);
    w[0] = std::move(w0);
  }

  const int n_layers = static_cast<int>(w.size());
  detail::AdamState adam;
  if (cfg.optimizer == TrainConfig::Optimizer::adam) {
    for (int l = 0; l < n_layers; ++l) {
      const auto lu = static_cast<std::size_t>(l);
      adam.mw.push_back(Eigen::MatrixXd::Zero(w[lu].rows(), w[lu].cols()));
      adam.vw.push_back(Eigen::MatrixXd::Zero(w[lu].rows(), w[lu].cols()));
      adam.mb.push_back(Eigen::VectorXd::Zero(b[lu].size()));
      adam.vb.push_back(Eigen::VectorXd::Zero(b[lu].size()));
    }
  }

  RngStream shuffle_rng(cfg.seed, streams::shuffle);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;

  const int bs_cap = static_cast<int>(std::min<Eigen::Index>(cfg.batch_size, n));
  Eigen::MatrixXd xb(bs_cap, xt.cols());
  Eigen::VectorXd yb(bs_cap);

  std::vector<Eigen::MatrixXd> acts(static_cast<std::size_t>(n_layers) + 1);
  std::vector<Eigen::MatrixXd> zs(static_cast<std::size_t>(n_layers));
  Gradients grads;
  grads.dw.resize(static_cast<std::size_t>(n_layers));
  grads.db.resize(static_cast<std::size_t>(n_layers));

  TrainResult result;
  result.history.reserve(static_cast<std::size_t>(cfg.epochs));

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (Eigen::Index i = n - 1; i > 0; --i) {
      const auto j = static_cast<Eigen::Index>(
          shuffle_rng.uniform_int(static_cast<std::uint64_t>(i) + 1));
      std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }

    double epoch_sse = 0.0;
    for (Eigen::Index start = 0; start < n; start += bs_cap) {
      const int bs = static_cast<int>(std::min<Eigen::Index>(bs_cap, n - start));
      for (int r = 0; r < bs; ++r) {
        const Eigen::Index src = perm[static_cast<std::size_t>(start + r)];
        xb.row(r) = xt.row(src);
        yb[r] = y[src];
      }
      const auto xview = xb.topRows(bs);
      const auto yview = yb.head(bs);

      // forward
      acts[0] = xview;
      for (int l = 0; l < n_layers; ++l) {
        const auto lu = static_cast<std::size_t>(l);
        Eigen::MatrixXd z = (acts[lu] * w[lu].transpose()).rowwise() + b[lu].transpose();
        zs[lu] = z;
        if (l + 1 < n_layers) z = z.cwiseMax(0.0);
        acts[lu + 1] = std::move(z);
      }

      // backward
      const double inv_b = 1.0 / static_cast<double>(bs);
      Eigen::VectorXd residual = acts[static_cast<std::size_t>(n_layers)].col(0) - yview;
      epoch_sse += residual.squaredNorm();
      Eigen::MatrixXd dz = (2.0 * inv_b) * residual;
      for (int l = n_layers - 1; l >= 0; --l) {
        const auto lu = static_cast<std::size_t>(l);
        grads.dw[lu].noalias() = dz.transpose() * acts[lu];
        grads.db[lu] = dz.colwise().sum().transpose();
        if (l > 0) {
          Eigen::MatrixXd da = dz * w[lu];
          dz = da.cwiseProduct((zs[lu - 1].array() > 0.0).cast<double>().matrix());
        }
      }

      // update
      double bc1 = 1.0, bc2 = 1.0;
      if (cfg.optimizer == TrainConfig::Optimizer::adam) {
        ++adam.t;
        bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam.t));
        bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam.t));
      }
      for (int l = 0; l < n_layers; ++l) {
        const auto lu = static_cast<std::size_t>(l);
        if (cfg.optimizer == TrainConfig::Optimizer::sgd) {
          w[lu].noalias() -= cfg.learning_rate * grads.dw[lu];
          b[lu].noalias() -= cfg.learning_rate * grads.db[lu];
        } else {
          auto& mw = adam.mw[lu];
          auto& vw = adam.vw[lu];
          mw = cfg.beta1 * mw + (1.0 - cfg.beta1) * grads.dw[lu];
          vw = cfg.beta2 * vw + (1.0 - cfg.beta2) * grads.dw[lu].cwiseProduct(grads.dw[lu]);
          w[lu].array() -=
              cfg.learning_rate * (mw.array() / bc1) / ((vw.array() / bc2).sqrt() + cfg.epsilon);
          auto& mb = adam.mb[lu];
          auto& vb = adam.vb[lu];
          mb = cfg.beta1 * mb + (1.0 - cfg.beta1) * grads.db[lu];
          vb = cfg.beta2 * vb + (1.0 - cfg.beta2) * grads.db[lu].cwiseProduct(grads.db[lu]);
          b[lu].array() -=
              cfg.learning_rate * (mb.array() / bc1) / ((vb.array() / bc2).sqrt() + cfg.epsilon);
        }
      }
    }

    const double epoch_mse = epoch_sse / static_cast<double>(n);
    if (!std::isfinite(epoch_mse))
      throw NumericError("training diverged at epoch " + std::to_string(epoch),
                         epoch);
    result.history.push_back(epoch_mse);
  }

  // Scatter the trained first layer back into full width; untouched columns
  // keep their initial weights.
  if (compressed) {
    Eigen::MatrixXd w0 = model.weights[0];
    for (int j = 0; j < k; ++j) w0.col(active[static_cast<std::size_t>(j)]) = w[0].col(j);
    w[0] = std::move(w0);
  }
  model.weights.assign(w.begin(), w.end());
  model.biases.assign(b.begin(), b.end());
  result.model = std::move(model);
  return result;
}

}  // namespace vibraug::neuralnet
