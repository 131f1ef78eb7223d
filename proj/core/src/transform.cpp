#include "crossflow/transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "crossflow/stats.hpp"

using json = nlohmann::json;

namespace crossflow {

double apply_step(const std::vector<double>& thresholds, double x) {
  if (x == 0.0) return 0.0;
  const double ax = std::fabs(x);
  const auto it =
      std::upper_bound(thresholds.begin(), thresholds.end(), ax);
  const double count = static_cast<double>(it - thresholds.begin());
  return x > 0.0 ? count : -count;
}

std::vector<double> apply_step(const std::vector<double>& thresholds,
                               std::span<const double> xs) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    out[i] = apply_step(thresholds, xs[i]);
  return out;
}

std::vector<double> init_partition(std::span<const double> xs, double q,
                                   int n) {
  if (xs.empty()) throw std::invalid_argument("init_partition on empty sample");
  if (n < 1) throw std::invalid_argument("partition size must be >= 1");
  const double m = stats::quantile(xs, q);
  const double M = stats::quantile(xs, 1.0 - q);
  if (m == M || n == 1) return {m};
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    t[i] = m + (M - m) * static_cast<double>(i) / static_cast<double>(n - 1);
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

namespace {

double avg_r2(const std::vector<double>& feature,
              const std::vector<std::vector<double>>& targets) {
  double total = 0.0;
  for (const auto& y : targets) total += stats::univariate_r2(feature, y);
  return total / static_cast<double>(targets.size());
}

}  // namespace

CalibrationResult calibrate_transform(
    std::span<const double> x,
    const std::vector<std::vector<double>>& targets,
    const std::vector<double>& t0, const FeatureKey& source) {
  if (x.size() < 2) throw std::invalid_argument("calibration needs >= 2 samples");
  if (targets.empty()) throw std::invalid_argument("calibration needs targets");
  for (const auto& y : targets)
    if (y.size() != x.size())
      throw std::invalid_argument("target length mismatch");

  CalibrationResult result;
  result.transform.source_feature = source;
  result.r2_bar_raw = avg_r2(std::vector<double>(x.begin(), x.end()), targets);

  std::vector<double> t = t0;
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());

  std::vector<double> base = apply_step(t, x);
  // pruning competes against the full initial partition, so a perfect
  // fit of the target on f_{T0}(x) is a fixed point of the loop
  double r2_bar = avg_r2(base, targets);
  std::vector<double> candidate(x.size());
  while (!t.empty()) {
    // f_{T \ {t_i}}(x) = f_T(x) - sgn(x) * 1{|x| >= t_i}
    double best_r2 = -1.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      for (std::size_t s = 0; s < x.size(); ++s) {
        double v = base[s];
        if (std::fabs(x[s]) >= t[i]) v -= x[s] > 0.0 ? 1.0 : (x[s] < 0.0 ? -1.0 : 0.0);
        candidate[s] = v;
      }
      const double r2 = avg_r2(candidate, targets);
      if (r2 > best_r2) {  // strict: ties resolve to the smallest index
        best_r2 = r2;
        best_i = i;
      }
    }
    if (!(best_r2 > r2_bar)) break;
    r2_bar = best_r2;
    result.r2_history.push_back(r2_bar);
    for (std::size_t s = 0; s < x.size(); ++s)
      if (std::fabs(x[s]) >= t[best_i])
        base[s] -= x[s] > 0.0 ? 1.0 : (x[s] < 0.0 ? -1.0 : 0.0);
    t.erase(t.begin() + static_cast<std::ptrdiff_t>(best_i));
  }

  result.transform.thresholds = std::move(t);
  result.transform.r2_bar_final = r2_bar;
  return result;
}

CalibrationResult calibrate_transform(
    std::span<const double> x,
    const std::vector<std::vector<double>>& targets, double q, int n,
    const FeatureKey& source) {
  return calibrate_transform(x, targets, init_partition(x, q, n), source);
}

std::string StepTransform::to_json() const {
  json j;
  j["feature"] = source_feature.column_name();
  j["thresholds"] = thresholds;
  j["r2_bar"] = r2_bar_final;
  return j.dump(2);
}

StepTransform StepTransform::from_json(const std::string& text) {
  const json j = json::parse(text);
  StepTransform t;
  t.source_feature = FeatureKey::parse(j.at("feature").get<std::string>());
  t.thresholds = j.at("thresholds").get<std::vector<double>>();
  t.r2_bar_final = j.at("r2_bar").get<double>();
  return t;
}

}  // namespace crossflow
