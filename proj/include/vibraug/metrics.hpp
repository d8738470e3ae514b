#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>

#include "vibraug/error.hpp"

// Regression quality measures. Conventions:
//  - pcc is the population Pearson correlation; undefined (absent) when
//    either side has zero variance or fewer than two points.
//  - r2 = 1 - SS_res/SS_tot; undefined when the targets are constant. Can be
//    negative for predictors worse than the mean.
//  - mre_percent averages |err|/|y| over points with |y| > 1e-12 only and is
//    absent when no point qualifies.
// Metrics are computed on whatever scale the caller trained in; report
// headers should say which.

namespace vibraug::metrics {

constexpr double kMreFloor = 1e-12;

struct MetricReport {
  std::optional<double> pcc;
  std::optional<double> r2;
  std::optional<double> mre_percent;
  double rmse = 0.0;
  double mse = 0.0;
  int n = 0;
  int n_mre = 0;  // points that entered the mre average
};

inline MetricReport evaluate(const Eigen::VectorXd& y_true,
                             const Eigen::VectorXd& y_pred) {
  const Eigen::Index n = y_true.size();
  if (n == 0) throw Error("metrics need at least one point");
  if (y_pred.size() != n) throw Error("prediction length does not match targets");
  if (!y_true.allFinite() || !y_pred.allFinite())
    throw Error("metrics need finite inputs");

  MetricReport rep;
  rep.n = static_cast<int>(n);

  const double mean_t = y_true.mean();
  const double mean_p = y_pred.mean();

  double ss_res = 0.0, ss_tot = 0.0, var_p = 0.0, cov = 0.0;
  double abs_rel = 0.0;
  int n_mre = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double err = y_pred[i] - y_true[i];
    const double dt = y_true[i] - mean_t;
    const double dp = y_pred[i] - mean_p;
    ss_res += err * err;
    ss_tot += dt * dt;
    var_p += dp * dp;
    cov += dt * dp;
    if (std::abs(y_true[i]) > kMreFloor) {
      abs_rel += std::abs(err) / std::abs(y_true[i]);
      ++n_mre;
    }
  }

  rep.mse = ss_res / static_cast<double>(n);
  rep.rmse = std::sqrt(rep.mse);
  rep.n_mre = n_mre;
  if (n_mre > 0) rep.mre_percent = 100.0 * abs_rel / static_cast<double>(n_mre);
  if (n >= 2 && ss_tot > 0.0) {
    rep.r2 = 1.0 - ss_res / ss_tot;
    if (var_p > 0.0) rep.pcc = cov / std::sqrt(ss_tot * var_p);
  }
  return rep;
}

inline constexpr const char* kReportCsvHeader =
    "target,model,train_size,pcc,r2,mre_percent,rmse,mse,n";

namespace detail {
inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
inline std::string num(const std::optional<double>& v) {
  return v ? num(*v) : "nan";
}
}  // namespace detail

inline std::string to_csv_row(const MetricReport& rep, const std::string& target,
                              const std::string& model, int train_size) {
  using detail::num;
  return target + ',' + model + ',' + std::to_string(train_size) + ',' +
         num(rep.pcc) + ',' + num(rep.r2) + ',' + num(rep.mre_percent) + ',' +
         num(rep.rmse) + ',' + num(rep.mse) + ',' + std::to_string(rep.n);
}

}  // namespace vibraug::metrics
