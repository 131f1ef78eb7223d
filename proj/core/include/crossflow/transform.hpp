#pragma once

#include <span>
#include <string>
#include <vector>

#include "crossflow/features.hpp"

namespace crossflow {

/// Sign-symmetric step-function transform f_T(x) = sgn(x) * #{t in T : |x| >= t}.
struct StepTransform {
  std::vector<double> thresholds;  // strictly increasing
  FeatureKey source_feature;
  double r2_bar_final = 0.0;  // average R^2 of the final transformed feature

  std::string to_json() const;
  static StepTransform from_json(const std::string& text);
};

double apply_step(const std::vector<double>& thresholds, double x);
std::vector<double> apply_step(const std::vector<double>& thresholds,
                               std::span<const double> xs);

/// n evenly spaced thresholds over [quantile_q(X), quantile_{1-q}(X)].
/// Collapses to a single threshold when the two quantiles coincide.
std::vector<double> init_partition(std::span<const double> xs,
                                   double q = 0.0001, int n = 100);

struct CalibrationResult {
  StepTransform transform;
  double r2_bar_raw = 0.0;           // baseline on the untransformed feature
  std::vector<double> r2_history;    // r2_bar after each accepted removal
};

/// Iterative threshold pruning: starting from T0, repeatedly remove the
/// threshold whose removal maximizes the market-averaged univariate R^2
/// of the targets on the transformed feature, as long as the average
/// strictly improves. Targets are aligned columns, one per market.
CalibrationResult calibrate_transform(
    std::span<const double> x,
    const std::vector<std::vector<double>>& targets,
    const std::vector<double>& t0, const FeatureKey& source = {});

/// Convenience: init_partition + calibrate_transform.
CalibrationResult calibrate_transform(
    std::span<const double> x,
    const std::vector<std::vector<double>>& targets, double q = 0.0001,
    int n = 100, const FeatureKey& source = {});

}  // namespace crossflow
