#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "crossflow/exchsim.hpp"
#include "crossflow/maker.hpp"
#include "crossflow/marketdata.hpp"

namespace crossflow {

/// Multi-market panel generator: a latent random-walk efficient price on
/// a 10 ms clock; market i quotes around the latent price delayed by
/// lag_ms[i]; taker flow on the lowest-lag markets correlates with
/// future latent increments per `informedness`.
struct GenConfig {
  std::uint64_t seed = 1;
  int n_markets = 4;
  std::vector<std::int64_t> lag_ms = {0, 200, 200, 200};
  std::vector<std::string> market_ids;  // defaults to mkt0..mktN-1
  double vol_bpts_per_sqrt_s = 20.0;
  std::vector<double> depth_profile_usd = {8000, 12000, 20000, 30000, 50000};
  double taker_intensity_per_s = 5.0;
  double informedness = 0.5;  // in [0, 1]
  std::int64_t informed_lookahead_ms = 500;
  std::int64_t duration_ms = 60000;
  std::int64_t snapshot_interval_ms = 50;
  double base_price = 100.0;
  double tick = 0.5;
  double quote_noise = 0.05;  // idiosyncratic mid noise, price units

  void validate() const;
  std::vector<std::string> ids() const;
};

struct GenOutput {
  std::map<std::string, std::vector<BookSnapshot>> books;
  std::map<std::string, std::vector<TradeTick>> trades;
};

GenOutput gen_panel(const GenConfig& config);

/// Single-market L3 event-stream generator. The top-of-book sizes follow
/// a slow bounded random walk; every `collapse_every_ms` the top ask
/// collapses to `collapse_size` at unchanged price, preceded by
/// `signal_lead_ms` of elevated predictions (the planted cancel signal).
/// With `sweeps` enabled, collapses become adverse taker sweeps followed
/// by a persistent price shift (alternating direction), and benign
/// two-sided flow provides regular fills.
struct L3GenConfig {
  std::uint64_t seed = 1;
  std::int64_t duration_ms = 600000;
  std::int64_t sample_ms = 50;
  double base_price = 100.0;
  double tick = 0.5;
  double deep_size_usd = 50000.0;
  double size_min = 400.0, size_max = 1000.0;
  double max_slew = 10.0;           // per sample
  std::int64_t collapse_every_ms = 10000;  // 0 disables collapses
  int collapse_hold_samples = 3;
  double collapse_size = 100.0;
  double forced_precollapse_size = 800.0;
  std::int64_t signal_lead_ms = 500;
  double prediction_signal = 3.0;
  double prediction_jitter = 1.0;  // uniform extra magnitude on the signal
  bool sweeps = false;
  double sweep_usd = 2500.0;
  int shift_ticks = 5;
  std::int64_t benign_every_ms = 0;  // 0 disables benign flow
  double benign_usd = 150.0;

  void validate() const;
};

struct L3GenOutput {
  std::vector<SimEvent> events;
  std::vector<MakerSignal> signals;   // one per sample
  std::vector<std::int64_t> sample_ts;
  std::vector<double> top_ask_price, top_ask_size;
  std::vector<double> top_bid_price, top_bid_size;
  std::vector<double> mid_price;
  std::vector<double> predictions;    // aligned to sample_ts
  std::size_t n_collapses = 0;
};

L3GenOutput gen_l3_events(const L3GenConfig& config);

}  // namespace crossflow
