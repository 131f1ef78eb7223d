#include "crossflow/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace crossflow {

void GenConfig::validate() const {
  if (n_markets < 1) throw std::invalid_argument("n_markets must be >= 1");
  if (static_cast<int>(lag_ms.size()) != n_markets)
    throw std::invalid_argument("lag_ms must have one entry per market");
  for (const auto l : lag_ms)
    if (l < 0) throw std::invalid_argument("lag_ms must be >= 0");
  if (informedness < 0.0 || informedness > 1.0)
    throw std::invalid_argument("informedness must be in [0,1]");
  if (depth_profile_usd.empty())
    throw std::invalid_argument("depth profile must be non-empty");
  if (tick <= 0.0 || base_price <= 0.0)
    throw std::invalid_argument("tick and base_price must be > 0");
  if (!market_ids.empty() &&
      static_cast<int>(market_ids.size()) != n_markets)
    throw std::invalid_argument("market_ids must match n_markets");
}

std::vector<std::string> GenConfig::ids() const {
  if (!market_ids.empty()) return market_ids;
  std::vector<std::string> out;
  for (int i = 0; i < n_markets; ++i) out.push_back("mkt" + std::to_string(i));
  return out;
}

namespace {

constexpr std::int64_t kLatentStepMs = 10;

double round_to_tick(double price, double tick) {
  return std::round(price / tick) * tick;
}

}  // namespace

GenOutput gen_panel(const GenConfig& config) {
  config.validate();
  const auto ids = config.ids();

  // latent efficient price, with lookahead margin for informed flow
  const std::int64_t horizon_ms =
      config.duration_ms + config.informed_lookahead_ms + kLatentStepMs;
  const std::size_t n_steps =
      static_cast<std::size_t>(horizon_ms / kLatentStepMs) + 1;
  std::mt19937_64 latent_rng(config.seed);
  std::normal_distribution<double> step_dist(
      0.0, config.vol_bpts_per_sqrt_s * 1e-4 * config.base_price *
               std::sqrt(static_cast<double>(kLatentStepMs) / 1000.0));
  std::vector<double> latent(n_steps);
  latent[0] = config.base_price;
  for (std::size_t k = 1; k < n_steps; ++k)
    latent[k] = latent[k - 1] + step_dist(latent_rng);

  auto latent_at = [&](std::int64_t ts_ms) {
    const std::int64_t clamped = std::max<std::int64_t>(0, ts_ms);
    const std::size_t k = std::min(
        n_steps - 1, static_cast<std::size_t>(clamped / kLatentStepMs));
    return latent[k];
  };

  const std::int64_t min_lag =
      *std::min_element(config.lag_ms.begin(), config.lag_ms.end());

  GenOutput out;
  for (int i = 0; i < config.n_markets; ++i) {
    const std::string& id = ids[static_cast<std::size_t>(i)];
    std::mt19937_64 rng(config.seed + 0x9e3779b97f4a7c15ull *
                                          static_cast<std::uint64_t>(i + 1));
    std::normal_distribution<double> quote_noise(0.0, config.quote_noise);
    std::uniform_real_distribution<double> depth_noise(0.5, 1.5);

    auto quote = [&](std::int64_t ts) {
      const double mid =
          latent_at(ts - config.lag_ms[static_cast<std::size_t>(i)]) +
          quote_noise(rng);
      const double bid = round_to_tick(mid, config.tick) - config.tick;
      return std::pair<double, double>{bid, bid + 2.0 * config.tick};
    };

    auto& books = out.books[id];
    for (std::int64_t ts = 0; ts <= config.duration_ms;
         ts += config.snapshot_interval_ms) {
      const auto [bid, ask] = quote(ts);
      BookSnapshot snap;
      snap.ts_ms = ts;
      snap.market_id = id;
      for (std::size_t l = 0; l < config.depth_profile_usd.size(); ++l) {
        const double sz_b = config.depth_profile_usd[l] * depth_noise(rng);
        const double sz_a = config.depth_profile_usd[l] * depth_noise(rng);
        snap.bids.push_back(
            {bid - static_cast<double>(l) * config.tick, sz_b});
        snap.asks.push_back(
            {ask + static_cast<double>(l) * config.tick, sz_a});
      }
      books.push_back(std::move(snap));
    }

    // taker flow: informed only on the lowest-lag markets
    const bool informed_market =
        config.lag_ms[static_cast<std::size_t>(i)] == min_lag;
    std::exponential_distribution<double> gap_dist(
        config.taker_intensity_per_s / 1000.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> amount_dist(100.0, 1000.0);
    auto& trades = out.trades[id];
    double t = gap_dist(rng);
    while (t < static_cast<double>(config.duration_ms)) {
      const std::int64_t ts = static_cast<std::int64_t>(t);
      Side side;
      if (informed_market && unit(rng) < config.informedness) {
        const double future =
            latent_at(ts + config.informed_lookahead_ms) - latent_at(ts);
        side = future >= 0.0 ? Side::Buy : Side::Sell;
      } else {
        side = unit(rng) < 0.5 ? Side::Buy : Side::Sell;
      }
      const auto [bid, ask] = quote(ts);
      TradeTick tick;
      tick.ts_ms = ts;
      tick.market_id = id;
      tick.side = side;
      tick.price = side == Side::Buy ? ask : bid;
      tick.amount_usd = amount_dist(rng);
      trades.push_back(std::move(tick));
      t += gap_dist(rng);
    }
  }
  return out;
}

void L3GenConfig::validate() const {
  if (sample_ms <= 0 || duration_ms <= 0)
    throw std::invalid_argument("durations must be > 0");
  if (collapse_every_ms != 0 && collapse_every_ms % sample_ms != 0)
    throw std::invalid_argument("collapse cadence must align to samples");
  if (signal_lead_ms % sample_ms != 0)
    throw std::invalid_argument("signal lead must align to samples");
  if (size_min >= size_max) throw std::invalid_argument("bad size range");
  if (collapse_size >= size_min)
    throw std::invalid_argument("collapse size must undercut size_min");
  if (tick <= 0.0 || base_price <= 0.0)
    throw std::invalid_argument("tick and base_price must be > 0");
}

L3GenOutput gen_l3_events(const L3GenConfig& config) {
  config.validate();
  L3GenOutput out;
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> slew(-config.max_slew,
                                              config.max_slew);
  std::uniform_real_distribution<double> size_init(config.size_min,
                                                   config.size_max);
  std::uniform_real_distribution<double> forced_jitter(0.0, 50.0);
  std::uniform_real_distribution<double> noise_pred(-1.0, 1.0);
  std::uniform_real_distribution<double> signal_jitter(0.0,
                                                       config.prediction_jitter);

  BookL3 book;
  std::int64_t seq = 0;
  std::int64_t next_id = 1;
  double bid_px = config.base_price - config.tick;
  double ask_px = config.base_price + config.tick;
  std::int64_t bid_top = 0, ask_top = 0, bid_deep = 0, ask_deep = 0;

  auto emit = [&](EventKind kind, Side side, double price, double size,
                  std::int64_t order_id, std::int64_t ts) {
    SimEvent e;
    e.seq = ++seq;
    e.ts_ms = ts;
    e.kind = kind;
    e.side = side;
    e.price = price;
    e.size_usd = size;
    e.order_id = order_id;
    out.events.push_back(e);
    book.apply_event(e);
  };

  auto submit = [&](Side side, double price, double size, std::int64_t ts) {
    const std::int64_t id = next_id++;
    emit(EventKind::SubmitLimit, side, price, size, id, ts);
    return id;
  };

  auto cancel_if_live = [&](std::int64_t id, std::int64_t ts) {
    if (id != 0 && book.has_order(id))
      emit(EventKind::Cancel, Side::Buy, 0.0, 0.0, id, ts);
  };

  double ask_target = size_init(rng);
  double bid_target = size_init(rng);
  double walk_resume = 0.5 * (config.size_min + config.size_max);

  // initial quotes at ts = 0
  bid_deep = submit(Side::Buy, bid_px - config.tick, config.deep_size_usd, 0);
  bid_top = submit(Side::Buy, bid_px, bid_target, 0);
  ask_deep = submit(Side::Sell, ask_px + config.tick, config.deep_size_usd, 0);
  ask_top = submit(Side::Sell, ask_px, ask_target, 0);

  auto requote = [&](std::int64_t ts) {
    cancel_if_live(bid_top, ts);
    cancel_if_live(bid_deep, ts);
    cancel_if_live(ask_top, ts);
    cancel_if_live(ask_deep, ts);
    bid_deep = submit(Side::Buy, bid_px - config.tick, config.deep_size_usd, ts);
    bid_top = submit(Side::Buy, bid_px, bid_target, ts);
    ask_deep =
        submit(Side::Sell, ask_px + config.tick, config.deep_size_usd, ts);
    ask_top = submit(Side::Sell, ask_px, ask_target, ts);
  };

  const std::size_t n_samples =
      static_cast<std::size_t>(config.duration_ms / config.sample_ms);
  int collapse_hold = 0;
  bool benign_buy_next = true;
  std::int64_t last_benign = -1;

  for (std::size_t k = 0; k < n_samples; ++k) {
    const std::int64_t ts =
        static_cast<std::int64_t>(k + 1) * config.sample_ms;

    std::int64_t to_collapse = -1;  // ms until next scheduled collapse
    std::size_t episode = 0;
    if (config.collapse_every_ms > 0) {
      episode = static_cast<std::size_t>(ts / config.collapse_every_ms);
      const std::int64_t next_c =
          (ts % config.collapse_every_ms == 0)
              ? ts
              : (episode + 1) * config.collapse_every_ms;
      if (next_c <= config.duration_ms) to_collapse = next_c - ts;
      if (ts % config.collapse_every_ms == 0) episode -= 1;  // current episode
    }
    const bool in_signal_window =
        to_collapse >= 0 && to_collapse <= config.signal_lead_ms;
    const bool collapse_now = to_collapse == 0;
    // sweep episodes alternate adverse direction: even hit the ask side
    const bool sell_episode = config.sweeps && (episode % 2 == 1);

    // evolve top-size targets
    if (collapse_hold > 0) {
      --collapse_hold;
      if (collapse_hold == 0) ask_target = walk_resume;
    } else if (collapse_now && !config.sweeps) {
      walk_resume = 0.5 * (config.size_min + config.size_max);
      ask_target = config.collapse_size;
      collapse_hold = config.collapse_hold_samples;
    } else if (in_signal_window && !collapse_now) {
      ask_target = config.forced_precollapse_size + forced_jitter(rng);
    } else {
      ask_target = std::clamp(ask_target + slew(rng), config.size_min,
                              config.size_max);
    }
    bid_target =
        std::clamp(bid_target + slew(rng), config.size_min, config.size_max);

    if (collapse_now && config.sweeps) {
      // adverse sweep through the touch, then a persistent price shift
      const Side sweep_side = sell_episode ? Side::Sell : Side::Buy;
      emit(EventKind::SubmitMarket, sweep_side, 0.0, config.sweep_usd, 0, ts);
      const double shift = static_cast<double>(config.shift_ticks) *
                           config.tick * (sell_episode ? -1.0 : 1.0);
      bid_px += shift;
      ask_px += shift;
      requote(ts);
      out.n_collapses += 1;
    } else {
      if (collapse_now) out.n_collapses += 1;
      // resync top orders to their targets
      if (book.remaining_size(ask_top) != ask_target) {
        cancel_if_live(ask_top, ts);
        ask_top = submit(Side::Sell, ask_px, ask_target, ts);
      }
      if (book.remaining_size(bid_top) != bid_target) {
        cancel_if_live(bid_top, ts);
        bid_top = submit(Side::Buy, bid_px, bid_target, ts);
      }
      if (!book.has_order(ask_deep))
        ask_deep = submit(Side::Sell, ask_px + config.tick,
                          config.deep_size_usd, ts);
      if (!book.has_order(bid_deep))
        bid_deep =
            submit(Side::Buy, bid_px - config.tick, config.deep_size_usd, ts);
    }

    // benign two-sided taker flow
    if (config.benign_every_ms > 0 && !collapse_now &&
        ts / config.benign_every_ms != last_benign / config.benign_every_ms) {
      emit(EventKind::SubmitMarket,
           benign_buy_next ? Side::Buy : Side::Sell, 0.0, config.benign_usd,
           0, ts);
      benign_buy_next = !benign_buy_next;
      last_benign = ts;
      // restore the consumed top immediately so the book state stays on
      // the target path
      if (book.remaining_size(ask_top) != ask_target) {
        cancel_if_live(ask_top, ts);
        ask_top = submit(Side::Sell, ask_px, ask_target, ts);
      }
      if (book.remaining_size(bid_top) != bid_target) {
        cancel_if_live(bid_top, ts);
        bid_top = submit(Side::Buy, bid_px, bid_target, ts);
      }
    }

    double prediction;
    if (in_signal_window) {
      // jitter keeps the calibrated median strictly inside the signal
      // range, so roughly half the planted samples clear it
      const double mag = config.prediction_signal + signal_jitter(rng);
      prediction = sell_episode ? -mag : mag;
    } else {
      prediction = noise_pred(rng);
    }

    out.sample_ts.push_back(ts);
    out.top_ask_price.push_back(ask_px);
    out.top_ask_size.push_back(book.top_size(Side::Sell));
    out.top_bid_price.push_back(bid_px);
    out.top_bid_size.push_back(book.top_size(Side::Buy));
    out.mid_price.push_back(0.5 * (bid_px + ask_px));
    out.predictions.push_back(prediction);
    out.signals.push_back({ts, prediction, prediction});
  }
  return out;
}

}  // namespace crossflow
