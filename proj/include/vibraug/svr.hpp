#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "vibraug/error.hpp"

// Epsilon-insensitive support vector regression with an RBF kernel, solved
// by sequential minimal optimization on the doubled variable set (one box
// variable per tube side and sample). The maximal-violating pair is picked
// with a second-order working-set rule; each iteration touches exactly the
// kernel columns of the two chosen rows, and the decision values F = K beta
// are maintained incrementally so gradients never need the full Gram matrix.
// For small problems the Gram matrix is cached column by column.
//
// Columns that hold a single value contribute nothing to squared distances,
// so the solver drops them from its working copy of the data; the kernel
// values are unchanged, term for term. Stored support vectors keep the full
// width.

namespace vibraug::svr {

struct SvrConfig {
  double c = 1.0;
  double epsilon_tube = 0.1;
  double gamma = 0.0;  // 0 means 1 / n_features
  double tol = 1e-3;
  int max_iterations = 10000;

  void validate() const {
    if (!(c > 0.0)) throw Error("c must be positive");
    if (epsilon_tube < 0.0) throw Error("epsilon_tube must be >= 0");
    if (gamma < 0.0) throw Error("gamma must be >= 0");
    if (!(tol > 0.0)) throw Error("tol must be positive");
    if (max_iterations < 1) throw Error("max_iterations must be >= 1");
  }
};

struct SvrModel {
  Eigen::MatrixXd support_vectors;  // full-width rows
  Eigen::VectorXd beta;             // one coefficient per support vector
  double bias = 0.0;
  double gamma = 0.0;
  bool converged = false;
  int iterations = 0;
  int feature_dim = 0;
  std::vector<double> objective;    // dual objective after every update
  Eigen::VectorXd alpha_up;         // diagnostics: tube-side multipliers
  Eigen::VectorXd alpha_down;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const {
    if (static_cast<int>(x.cols()) != feature_dim)
      throw Error("input dimension mismatch");
    Eigen::VectorXd out = Eigen::VectorXd::Constant(x.rows(), bias);
    if (beta.size() == 0) return out;
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      const Eigen::VectorXd d2 =
          (support_vectors.rowwise() - x.row(r)).rowwise().squaredNorm();
      out[r] += ((-gamma * d2.array()).exp() * beta.array()).sum();
    }
    return out;
  }
};

namespace detail {

constexpr int kGramCacheLimit = 2048;
constexpr double kTau = 1e-12;

struct KernelSource {
  const Eigen::MatrixXd& xc;  // compressed active columns
  double gamma;
  Eigen::MatrixXd cache;      // lazily filled columns when n is small
  std::vector<char> cached;
  Eigen::VectorXd scratch;

  KernelSource(const Eigen::MatrixXd& x, double g) : xc(x), gamma(g) {
    const Eigen::Index n = x.rows();
    if (n <= kGramCacheLimit) {
      cache.resize(n, n);
      cached.assign(static_cast<std::size_t>(n), 0);
    }
    scratch.resize(n);
  }

  // K(., r) for every training row.
  const Eigen::VectorXd& column(int r) {
    if (!cached.empty()) {
      if (!cached[static_cast<std::size_t>(r)]) {
        cache.col(r) = (-(gamma) * (xc.rowwise() - xc.row(r)).rowwise().squaredNorm().array())
                           .exp();
        cached[static_cast<std::size_t>(r)] = 1;
      }
      scratch = cache.col(r);
      return scratch;
    }
    scratch =
        (-(gamma) * (xc.rowwise() - xc.row(r)).rowwise().squaredNorm().array()).exp();
    return scratch;
  }
};

}  // namespace detail

inline SvrModel fit_svr(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        const SvrConfig& cfg) {
  cfg.validate();
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  if (n == 0) throw Error("empty training set");
  if (y.size() != n) throw Error("targets do not match rows");

  const double gamma = cfg.gamma > 0.0 ? cfg.gamma : 1.0 / static_cast<double>(p);
  const double c = cfg.c;
  const double eps = cfg.epsilon_tube;

  // Drop single-valued columns from the distance computation; their
  // differences are identically zero.
  std::vector<int> active;
  for (int d = 0; d < p; ++d)
    if (x.col(d).minCoeff() != x.col(d).maxCoeff()) active.push_back(d);
  Eigen::MatrixXd xc(n, static_cast<int>(active.size()));
  for (int j = 0; j < static_cast<int>(active.size()); ++j)
    xc.col(j) = x.col(active[static_cast<std::size_t>(j)]);

  detail::KernelSource kernel(xc, gamma);

  // Variable t < n is the upper tube multiplier of row t (sign +1), variable
  // t >= n the lower one of row t - n (sign -1). With F = K beta maintained,
  // the gradient of variable t is sign * F[row] + p[t], and the violation
  // score -sign * G is y[row] - F[row] -/+ eps.
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(2 * n);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);

  SvrModel model;
  model.gamma = gamma;
  model.feature_dim = p;
  model.objective.push_back(0.0);

  auto violation = [&](int t) {
    return t < n ? y[t] - f[t] - eps : y[t - n] - f[t - n] + eps;
  };
  auto in_up = [&](int t) {
    return t < n ? alpha[t] < c : alpha[t] > 0.0;
  };
  auto in_low = [&](int t) {
    return t < n ? alpha[t] > 0.0 : alpha[t] < c;
  };

  int iter = 0;
  double m_final = 0.0, big_m_final = 0.0;
  while (true) {
    // Most violating variable on the up side, and the low-side bound.
    double m = -std::numeric_limits<double>::infinity();
    double big_m = std::numeric_limits<double>::infinity();
    int i = -1;
    for (int t = 0; t < 2 * n; ++t) {
      const double v = violation(t);
      if (in_up(t) && v > m) {
        m = v;
        i = t;
      }
      if (in_low(t) && v < big_m) big_m = v;
    }
    m_final = m;
    big_m_final = big_m;
    if (i < 0 || m - big_m <= cfg.tol) {
      model.converged = true;
      break;
    }
    if (iter >= cfg.max_iterations) break;

    const int ri = i < n ? i : i - n;
    const double sign_i = i < n ? 1.0 : -1.0;
    const Eigen::VectorXd col_i = kernel.column(ri);

    // Second-order partner choice among violating low-side variables.
    int j = -1;
    double best_obj = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 2 * n; ++t) {
      if (!in_low(t)) continue;
      const double vt = violation(t);
      const double grad_diff = m - vt;
      if (grad_diff <= 0.0) continue;
      const int rt = t < n ? t : t - n;
      double a = 2.0 - 2.0 * col_i[rt];
      if (a <= 0.0) a = detail::kTau;
      const double obj = -(grad_diff * grad_diff) / a;
      if (obj < best_obj) {
        best_obj = obj;
        j = t;
      }
    }
    if (j < 0) {
      model.converged = true;
      break;
    }

    const int rj = j < n ? j : j - n;
    const double sign_j = j < n ? 1.0 : -1.0;
    const Eigen::VectorXd col_j = rj == ri ? col_i : kernel.column(rj);

    const double g_i = sign_i * f[ri] + (i < n ? eps - y[ri] : eps + y[ri]);
    const double g_j = sign_j * f[rj] + (j < n ? eps - y[rj] : eps + y[rj]);
    double quad = 2.0 - 2.0 * col_i[rj];
    if (quad <= 0.0) quad = detail::kTau;

    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    if (sign_i != sign_j) {
      const double delta = (-g_i - g_j) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else {
        if (alpha[i] < 0.0) {
          alpha[i] = 0.0;
          alpha[j] = -diff;
        }
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = c + diff;
        }
      }
    } else {
      const double delta = (g_i - g_j) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = sum;
        }
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else {
        if (alpha[i] < 0.0) {
          alpha[i] = 0.0;
          alpha[j] = sum;
        }
      }
    }

    const double dbeta_i = sign_i * (alpha[i] - old_ai);
    const double dbeta_j = sign_j * (alpha[j] - old_aj);
    beta[ri] += dbeta_i;
    beta[rj] += dbeta_j;
    f += dbeta_i * col_i;
    f += dbeta_j * col_j;
    ++iter;

    // Dual objective from the maintained decision values.
    const double w = 0.5 * beta.dot(f) + eps * alpha.sum() - y.dot(beta);
    model.objective.push_back(w);
  }
  model.iterations = iter;

  // Bias from the average of -sign * G over free variables, or the midpoint
  // of the optimality bounds when nothing is strictly inside the box.
  double sum_free = 0.0;
  int n_free = 0;
  for (int t = 0; t < 2 * n; ++t) {
    if (alpha[t] > 0.0 && alpha[t] < c) {
      sum_free += violation(t);
      ++n_free;
    }
  }
  model.bias = n_free > 0 ? sum_free / static_cast<double>(n_free)
                          : (m_final + big_m_final) / 2.0;

  model.alpha_up = alpha.head(n);
  model.alpha_down = alpha.tail(n);

  bool any_sv = false;
  for (int r = 0; r < n; ++r)
    if (std::abs(beta[r]) > 1e-12) any_sv = true;
  if (!any_sv) {
    // Degenerate fit: everything sits inside the tube, so fall back to the
    // mean rather than an arbitrary tube midpoint.
    model.bias = y.sum() / static_cast<double>(n);
    model.support_vectors.resize(0, p);
    model.beta.resize(0);
    return model;
  }

  int n_sv = 0;
  for (int r = 0; r < n; ++r)
    if (beta[r] != 0.0) ++n_sv;
  model.support_vectors.resize(n_sv, p);
  model.beta.resize(n_sv);
  int out = 0;
  for (int r = 0; r < n; ++r) {
    if (beta[r] == 0.0) continue;
    model.support_vectors.row(out) = x.row(r);
    model.beta[out] = beta[r];
    ++out;
  }
  return model;
}

}  // namespace vibraug::svr
