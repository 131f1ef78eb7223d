#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crossflow/features.hpp"

namespace crossflow {

/// Column-major design matrix plus aligned target, after dropping rows
/// with any absent value.
struct DenseData {
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> X;  // X[c][r]
  std::vector<double> y;
  std::vector<std::int64_t> ts;

  std::size_t n_rows() const { return y.size(); }
  std::size_t n_features() const { return X.size(); }
};

DenseData dense_rows(const FeatureMatrix& m,
                     const std::vector<std::string>& feature_cols,
                     const std::string& target_col);

/// Linear model on standardized features: prediction =
/// intercept + sum_i coef[i] * (x_i - mean[i]) / std[i].
struct LinearModel {
  std::string target;
  std::int64_t delta_ms = 0;
  double intercept = 0.0;
  std::vector<std::string> feature_names;
  std::vector<double> coefficients;  // standardized scale
  std::vector<double> means;
  std::vector<double> stds;

  double predict(std::span<const double> raw_row) const;
  std::vector<double> predict_all(const DenseData& data) const;
};

struct FitDiagnostics {
  double r2_in_sample = 0.0;
  std::optional<double> r2_out_of_sample;
  std::vector<double> t_stats;   // per feature, standardized scale
  std::vector<double> p_values;  // two-sided, dof = n - p - 1
  std::size_t n_samples = 0;
  bool converged = true;        // lasso only
  double last_delta = 0.0;      // lasso: max coef change at termination
};

struct FitResult {
  LinearModel model;
  FitDiagnostics diagnostics;

  std::string to_json() const;
  static FitResult from_json(const std::string& text);
};

/// Least squares on standardized features; t statistics from the
/// classical covariance estimate. Throws on rank deficiency (the message
/// names the offending columns) and on n <= p.
FitResult fit_ols(const DenseData& data, const std::string& target = "",
                  std::int64_t delta_ms = 0);

/// Coordinate descent for (1/(2n))||y - b0 - Xw||^2 + lambda*||w||_1 with
/// unpenalized intercept on standardized features. Soft-thresholding
/// produces exact zeros. Converges when the max coefficient change per
/// sweep is < 1e-8, capped at 1e5 sweeps.
FitResult fit_lasso(const DenseData& data, double lambda,
                    const std::string& target = "", std::int64_t delta_ms = 0);

/// {0.001 * 2^k | k = 0..8}
std::vector<double> lasso_lambda_grid();

int count_nonzero(const LinearModel& model);

/// For each horizon, average the univariate R^2 of every target column on
/// the feature column at that horizon; return the argmax horizon.
/// Ties break toward the smallest horizon. Rows with absent values are
/// dropped per (horizon, target) pair.
std::int64_t select_horizon(
    const std::vector<std::int64_t>& horizons,
    const std::vector<Series>& feature_by_horizon,
    const std::vector<Series>& targets);

struct MetaWeights {
  std::vector<std::string> sources;  // source market ids
  std::vector<double> weights;       // in [0,1], max exactly 1
  bool degenerate = false;           // all R^2 were 0 -> uniform weights
};

/// alpha_j = R^2_j / max_j R^2_j from univariate fits of y on each source
/// column; uniform weights (flagged) when every R^2 is zero.
MetaWeights meta_weights(const std::vector<std::string>& sources,
                         const std::vector<std::vector<double>>& source_cols,
                         const std::vector<double>& y);

std::vector<double> weighted_sum(
    const std::vector<std::vector<double>>& cols,
    const std::vector<double>& weights);

}  // namespace crossflow
