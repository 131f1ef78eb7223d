#pragma once

#include <map>
#include <string>
#include <vector>

#include "crossflow/features.hpp"
#include "crossflow/maker.hpp"
#include "crossflow/marketdata.hpp"

namespace crossflow {

struct TransformSettings {
  double q = 0.0001;
  int n = 100;
  // which families adopt the calibrated step transform
  bool adopt_tfi = true;
  bool adopt_pret_when_improved = true;
  bool adopt_imb = false;
  bool adopt_div = false;
};

struct ModelSettings {
  std::vector<double> lambda_grid;  // defaults to {0.001 * 2^k, k=0..8}
  std::int64_t primary_delta_ms = 500;
};

struct BacktestSettings {
  double threshold_percentile = 0.95;
};

/// Full pipeline configuration: market specs with the fee schedule,
/// horizon grids, transform/model/backtest/maker settings.
struct RunConfig {
  std::map<std::string, MarketSpec> markets;
  FeatureConfig features;
  TransformSettings transform;
  ModelSettings models;
  BacktestSettings backtest;
  MakerParams maker;

  /// The 14-market reference universe with its taker fee schedule.
  static RunConfig defaults();

  static RunConfig from_json_text(const std::string& text);
  static RunConfig load(const std::string& path);
  std::string to_json_text() const;
  void save(const std::string& path) const;

  /// Every violated field, empty when valid.
  std::vector<std::string> validation_errors() const;
  void validate() const;  // throws listing all violations
};

}  // namespace crossflow
