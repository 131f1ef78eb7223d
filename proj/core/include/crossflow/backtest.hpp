#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "crossflow/leadlag.hpp"
#include "crossflow/marketdata.hpp"

namespace crossflow {

struct Fill {
  std::int64_t ts_ms = 0;
  Side side = Side::Buy;
  double price = 0.0;
};

/// Fills from one walk-forward; sides strictly alternate and the position
/// path stays in {-1, 0, +1}.
struct FillSequence {
  std::vector<Fill> fills;
  std::vector<int> position_path;  // position after each fill
  std::size_t skipped_signals = 0; // signal fired but book absent
};

/// 95th percentile (linear interpolation) of the in-sample predictions.
double threshold_from_insample(std::span<const double> predictions);

/// Walk the grid chronologically: position <= 0 and prediction > T buys
/// one unit at the top ask; position >= 0 and prediction < -T sells one
/// unit at the top bid. Absent predictions or books skip the step.
FillSequence run_taker_walkforward(const std::vector<std::int64_t>& ts,
                                   const Series& predictions,
                                   const AlignedBookSeries& books, double T);

struct PnLReport {
  double pnl1 = 0.0;  // bpts over consecutive fill pairs
  double pnl2 = 0.0;  // pnl1 - n_trades * fee_default
  double pnl3 = 0.0;  // pnl1 - n_trades * fee_vip
  std::size_t n_trades = 0;
  double threshold = 0.0;
};

/// pnl1 sums, over overlapping consecutive fill pairs (k, k+1),
/// (p_{k+1}/p_k - 1)*1e4 when fill k is a buy and (p_k/p_{k+1} - 1)*1e4
/// when it is a sell; a trailing unmatched fill contributes 0 to pnl1 but
/// is charged its fee in pnl2/pnl3.
PnLReport compute_pnl(const FillSequence& seq, double fee_default_bpts,
                      double fee_vip_bpts, double threshold = 0.0);

/// Model predictions over the feature matrix grid; absent where any
/// input column is absent.
Series predict_series(const LinearModel& model, const FeatureMatrix& features);

struct PnLMatrix {
  std::vector<std::string> markets;
  std::vector<std::vector<PnLReport>> cells;  // [target i][source j]
  std::vector<double> row_avg_pnl1, col_avg_pnl1;
};

/// Out-of-sample backtest of every pairwise lead-lag model: thresholds
/// from in-sample predictions, fills on the target market's books, fees
/// from the target market's spec.
PnLMatrix pnl_matrix(const LeadLagMatrix& models,
                     const FeatureMatrix& insample, const FeatureMatrix& oos,
                     const SampledPanel& oos_panel,
                     const std::map<std::string, MarketSpec>& specs);

/// Emits <prefix>pnl1.csv, <prefix>pnl2.csv, <prefix>pnl3.csv and
/// per-cell <prefix>trades_<i>_<j>.csv files (when write_trades).
void write_pnl_csv(const PnLMatrix& matrix, const std::string& prefix);
void write_trades_csv(const FillSequence& seq, const std::string& path);

}  // namespace crossflow
