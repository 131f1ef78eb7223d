#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "crossflow/exchsim.hpp"

namespace crossflow {

/// Strategy inputs at a point in time: the (meta-)model prediction F and
/// the meta trade flow imbalance gate value.
struct MakerSignal {
  std::int64_t ts_ms = 0;
  double prediction = 0.0;
  double mtfi = 0.0;
};

struct MakerParams {
  double cancel_threshold = 2.0;  // T
  double flow_gate = 0.0;         // T'
  double amount_usd = 2000.0;
  double tick = 0.5;
  double rate_capacity = 100.0;
  double rate_refill_per_minute = 100.0;
  int initial_position = 1;       // P0
  double maker_rebate_bpts = 0.0;

  /// Gates wide open, never cancels: the benchmark configuration.
  static MakerParams benchmark(double amount_usd, double tick) {
    MakerParams p;
    p.cancel_threshold = std::numeric_limits<double>::infinity();
    p.flow_gate = std::numeric_limits<double>::infinity();
    p.amount_usd = amount_usd;
    p.tick = tick;
    return p;
  }
};

/// One aggregated execution of an own order (partials within the
/// triggering event merged at their volume-weighted price).
struct MakerFill {
  std::int64_t ts_ms = 0;
  Side side = Side::Buy;
  double price = 0.0;
  double size_usd = 0.0;
};

struct MakerResult {
  std::vector<MakerFill> fills;
  std::vector<int> position_path;  // after each fill
  std::size_t n_posts = 0;
  std::size_t n_cancels = 0;
  std::size_t suppressed_actions = 0;  // rate limiter exhausted
  std::vector<std::string> diagnostics;
};

/// Event-driven maker simulation: replays the market event stream through
/// the matching engine while two coupled bots share inventory P and one
/// rate limiter. After each event, with F the latest prediction at or
/// before the event time: the sell bot posts `amount` at best_bid + tick
/// iff F <= T and mTFI < T' and more than one token remains and P > 0,
/// and cancels its resting order iff F > T; the buy bot is the mirror
/// (posts at best_ask - tick iff F >= -T and mTFI > -T' and P <= 0,
/// cancels iff F < -T). An own fill flips the position one unit and the
/// order's remainder is cancelled, so fills strictly alternate sides.
MakerResult run_maker_strategy(const std::vector<SimEvent>& events,
                               const std::vector<MakerSignal>& signals,
                               const MakerParams& params);

struct CancelCalibration {
  double threshold = 0.0;          // T: median prediction over the set F
  std::map<int, double> quantiles; // percent (30..70) -> T_q
  std::size_t n_qualifying = 0;
  double m = 0.0;                  // Q1 of top-ask sizes
  double M = 0.0;                  // Q2 of top-ask sizes
  std::vector<std::size_t> qualifying_indices;
};

/// Builds the set F of samples whose top-ask liquidity exceeds the second
/// quartile M and collapses below the first quartile m within `window_ms`
/// at unchanged top-ask price, then returns the median model prediction
/// over F (plus the 30th-70th percentile family). Throws when F is empty.
CancelCalibration calibrate_cancel_threshold(
    const std::vector<std::int64_t>& ts,
    const std::vector<double>& top_ask_price,
    const std::vector<double>& top_ask_size,
    const std::vector<double>& predictions, std::int64_t window_ms = 500);

inline const std::vector<std::int64_t> kAdverseHorizonsMs = {
    500,    5000,   10000,   30000,   60000,  150000,
    300000, 600000, 1200000, 2400000, 4800000};

struct AdverseStats {
  double avg = 0.0, std_dev = 0.0;
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
  std::size_t n = 0;
};

struct AdverseSelectionReport {
  std::vector<std::int64_t> horizons_ms;
  std::vector<AdverseStats> stats;
};

/// Signed post-fill move per fill and horizon:
/// side_sign * (p_{t+delta} / p_fill - 1) * 1e4 with side_sign +1 for
/// buys and -1 for sells, so adverse moves are negative. Fills whose
/// horizon extends past the price series are excluded for that horizon.
AdverseSelectionReport adverse_selection(
    const std::vector<MakerFill>& fills,
    const std::vector<std::int64_t>& price_ts,
    const std::vector<double>& price,
    const std::vector<std::int64_t>& horizons_ms = kAdverseHorizonsMs);

struct PnLPoint {
  std::int64_t ts_ms = 0;
  double realized_usd = 0.0;  // cash from fills plus rebates
  double total_usd = 0.0;     // realized plus inventory marked at last price
};

/// USD PnL path: at each price sample, the fill set so far augmented with
/// a synthetic flattening trade of the open inventory at the last price;
/// maker rebates accrue per filled leg.
std::vector<PnLPoint> pnl_timeseries(const std::vector<MakerFill>& fills,
                                     const std::vector<std::int64_t>& price_ts,
                                     const std::vector<double>& price,
                                     double rebate_bpts);

void write_fills_csv(const std::vector<MakerFill>& fills,
                     const std::string& path);
void write_pnl_path_csv(const std::vector<PnLPoint>& path,
                        const std::string& file);
void write_adverse_csv(const AdverseSelectionReport& report,
                       const std::string& path);

}  // namespace crossflow
