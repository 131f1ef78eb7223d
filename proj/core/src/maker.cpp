#include "crossflow/maker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "crossflow/csv.hpp"
#include "crossflow/stats.hpp"

namespace crossflow {

namespace {

constexpr const char* kOwner = "strategy";

struct OwnOrder {
  std::int64_t order_id = 0;
  bool active = false;
};

}  // namespace

MakerResult run_maker_strategy(const std::vector<SimEvent>& events,
                               const std::vector<MakerSignal>& signals,
                               const MakerParams& params) {
  if (params.amount_usd <= 0.0)
    throw std::invalid_argument("maker amount must be > 0");
  if (params.rate_capacity < 2.0)
    throw std::invalid_argument("rate capacity must be >= 2");

  MakerResult result;
  BookL3 book;
  TokenBucket bucket(params.rate_capacity, params.rate_refill_per_minute);
  int position = params.initial_position;
  OwnOrder own_sell, own_buy;
  std::int64_t next_own_id = -1;  // negative ids never collide with the stream
  std::size_t sig_next = 0;
  bool have_signal = false;
  MakerSignal sig;

  auto cancel_own = [&](OwnOrder& order, const SimEvent& cause) {
    SimEvent cancel;
    cancel.seq = cause.seq;
    cancel.ts_ms = cause.ts_ms;
    cancel.kind = EventKind::Cancel;
    cancel.order_id = order.order_id;
    book.apply_event(cancel);
    order.active = false;
  };

  std::int64_t next_seq = 0;

  auto act = [&](std::int64_t now) {
    if (!have_signal) return;
    const double F = sig.prediction;
    SimEvent cause;
    cause.seq = next_seq;
    cause.ts_ms = now;

    // sell bot
    if (own_sell.active && F > params.cancel_threshold) {
      if (bucket.try_consume(now)) {
        cancel_own(own_sell, cause);
        ++result.n_cancels;
      } else {
        ++result.suppressed_actions;
      }
    } else if (!own_sell.active && F <= params.cancel_threshold &&
               sig.mtfi < params.flow_gate && position > 0 &&
               bucket.available(now) > 1.0) {
      const auto bid = book.best_bid();
      const auto ask = book.best_ask();
      if (bid && ask && *bid + params.tick < *ask && bucket.try_consume(now)) {
        SimEvent post;
        post.seq = next_seq;
        post.ts_ms = now;
        post.kind = EventKind::SubmitLimit;
        post.side = Side::Sell;
        post.price = *bid + params.tick;
        post.size_usd = params.amount_usd;
        post.order_id = next_own_id--;
        post.owner = kOwner;
        book.apply_event(post);
        own_sell = {post.order_id, true};
        ++result.n_posts;
      }
    }

    // buy bot, mirrored
    if (own_buy.active && F < -params.cancel_threshold) {
      if (bucket.try_consume(now)) {
        cancel_own(own_buy, cause);
        ++result.n_cancels;
      } else {
        ++result.suppressed_actions;
      }
    } else if (!own_buy.active && F >= -params.cancel_threshold &&
               sig.mtfi > -params.flow_gate && position <= 0 &&
               bucket.available(now) > 1.0) {
      const auto bid = book.best_bid();
      const auto ask = book.best_ask();
      if (bid && ask && *ask - params.tick > *bid && bucket.try_consume(now)) {
        SimEvent post;
        post.seq = next_seq;
        post.ts_ms = now;
        post.kind = EventKind::SubmitLimit;
        post.side = Side::Buy;
        post.price = *ask - params.tick;
        post.size_usd = params.amount_usd;
        post.order_id = next_own_id--;
        post.owner = kOwner;
        book.apply_event(post);
        own_buy = {post.order_id, true};
        ++result.n_posts;
      }
    }
  };

  for (const auto& event : events) {
    // signals strictly before this event act first: a cancel can win the race
    while (sig_next < signals.size() &&
           signals[sig_next].ts_ms < event.ts_ms) {
      sig = signals[sig_next];
      have_signal = true;
      act(signals[sig_next].ts_ms);
      ++sig_next;
    }

    next_seq = event.seq;
    const auto fills = book.apply_event(event);

    // own executions: aggregate, flip position one unit, drop the rest
    for (OwnOrder* own : {&own_sell, &own_buy}) {
      if (!own->active) continue;
      double filled = 0.0, weighted = 0.0;
      for (const auto& f : fills) {
        if (f.maker_order_id != own->order_id) continue;
        filled += f.size_usd;
        weighted += f.size_usd * f.price;
      }
      if (filled <= 0.0) continue;
      const Side side = own == &own_sell ? Side::Sell : Side::Buy;
      result.fills.push_back({event.ts_ms, side, weighted / filled, filled});
      position += side == Side::Buy ? 1 : -1;
      result.position_path.push_back(position);
      if (book.has_order(own->order_id)) cancel_own(*own, event);
      own->active = false;
    }

    while (sig_next < signals.size() &&
           signals[sig_next].ts_ms <= event.ts_ms) {
      sig = signals[sig_next++];
      have_signal = true;
    }
    act(event.ts_ms);
  }

  result.diagnostics = book.diagnostics();
  return result;
}

CancelCalibration calibrate_cancel_threshold(
    const std::vector<std::int64_t>& ts,
    const std::vector<double>& top_ask_price,
    const std::vector<double>& top_ask_size,
    const std::vector<double>& predictions, std::int64_t window_ms) {
  const std::size_t n = ts.size();
  if (top_ask_price.size() != n || top_ask_size.size() != n ||
      predictions.size() != n)
    throw std::invalid_argument("calibration inputs misaligned");
  if (n == 0) throw std::invalid_argument("calibration needs samples");

  CancelCalibration out;
  out.m = stats::quantile(top_ask_size, 0.25);
  out.M = stats::quantile(top_ask_size, 0.50);

  std::vector<double> qualifying;
  for (std::size_t t = 0; t < n; ++t) {
    if (!(top_ask_size[t] > out.M)) continue;
    bool collapses = false;
    for (std::size_t u = t + 1; u < n && ts[u] <= ts[t] + window_ms; ++u) {
      if (top_ask_price[u] == top_ask_price[t] && top_ask_size[u] < out.m) {
        collapses = true;
        break;
      }
    }
    if (!collapses) continue;
    qualifying.push_back(predictions[t]);
    out.qualifying_indices.push_back(t);
  }
  if (qualifying.empty())
    throw std::runtime_error("no qualifying top-ask collapse samples");

  out.n_qualifying = qualifying.size();
  out.threshold = stats::median(qualifying);
  for (int pct = 30; pct <= 70; pct += 10)
    out.quantiles[pct] =
        stats::quantile(qualifying, static_cast<double>(pct) / 100.0);
  return out;
}

AdverseSelectionReport adverse_selection(
    const std::vector<MakerFill>& fills,
    const std::vector<std::int64_t>& price_ts,
    const std::vector<double>& price,
    const std::vector<std::int64_t>& horizons_ms) {
  if (price_ts.size() != price.size())
    throw std::invalid_argument("price series misaligned");
  AdverseSelectionReport report;
  report.horizons_ms = horizons_ms;
  for (const std::int64_t h : horizons_ms) {
    std::vector<double> entries;
    for (const auto& fill : fills) {
      const std::int64_t target = fill.ts_ms + h;
      if (price_ts.empty() || target > price_ts.back()) continue;
      // last price sample at or before the horizon end
      const auto it =
          std::upper_bound(price_ts.begin(), price_ts.end(), target);
      if (it == price_ts.begin()) continue;
      const double p_later =
          price[static_cast<std::size_t>(it - price_ts.begin()) - 1];
      const double sign = fill.side == Side::Buy ? 1.0 : -1.0;
      entries.push_back(sign * (p_later / fill.price - 1.0) * 1e4);
    }
    AdverseStats s;
    s.n = entries.size();
    if (!entries.empty()) {
      s.avg = stats::mean(entries);
      s.std_dev = stats::stddev(entries);
      s.min = stats::quantile(entries, 0.0);
      s.q1 = stats::quantile(entries, 0.25);
      s.median = stats::median(entries);
      s.q3 = stats::quantile(entries, 0.75);
      s.max = stats::quantile(entries, 1.0);
    }
    report.stats.push_back(s);
  }
  return report;
}

std::vector<PnLPoint> pnl_timeseries(const std::vector<MakerFill>& fills,
                                     const std::vector<std::int64_t>& price_ts,
                                     const std::vector<double>& price,
                                     double rebate_bpts) {
  std::vector<PnLPoint> path;
  path.reserve(price_ts.size());
  double cash = 0.0, inventory_units = 0.0, rebates = 0.0;
  std::size_t next_fill = 0;
  for (std::size_t i = 0; i < price_ts.size(); ++i) {
    while (next_fill < fills.size() && fills[next_fill].ts_ms <= price_ts[i]) {
      const MakerFill& f = fills[next_fill++];
      const double units = f.size_usd / f.price;
      if (f.side == Side::Buy) {
        cash -= f.size_usd;
        inventory_units += units;
      } else {
        cash += f.size_usd;
        inventory_units -= units;
      }
      rebates += rebate_bpts * 1e-4 * f.size_usd;
    }
    PnLPoint pt;
    pt.ts_ms = price_ts[i];
    pt.realized_usd = cash + rebates;
    pt.total_usd = pt.realized_usd + inventory_units * price[i];
    path.push_back(pt);
  }
  return path;
}

void write_fills_csv(const std::vector<MakerFill>& fills,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "ts_ms,side,price,size_usd\n";
  for (const auto& f : fills)
    out << f.ts_ms << ',' << to_string(f.side) << ','
        << csv::format_double(f.price) << ',' << csv::format_double(f.size_usd)
        << '\n';
}

void write_pnl_path_csv(const std::vector<PnLPoint>& path,
                        const std::string& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file);
  out << "ts_ms,realized_usd,total_usd\n";
  for (const auto& pt : path)
    out << pt.ts_ms << ',' << csv::format_double(pt.realized_usd) << ','
        << csv::format_double(pt.total_usd) << '\n';
}

void write_adverse_csv(const AdverseSelectionReport& report,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "stat";
  for (const std::int64_t h : report.horizons_ms) out << ',' << h;
  out << '\n';
  const std::vector<std::pair<std::string, double AdverseStats::*>> rows = {
      {"avg", &AdverseStats::avg},     {"std", &AdverseStats::std_dev},
      {"min", &AdverseStats::min},     {"q1", &AdverseStats::q1},
      {"median", &AdverseStats::median}, {"q3", &AdverseStats::q3},
      {"max", &AdverseStats::max}};
  for (const auto& [name, field] : rows) {
    out << name;
    for (const auto& s : report.stats)
      out << ',' << csv::format_double(s.*field);
    out << '\n';
  }
  out << "n";
  for (const auto& s : report.stats) out << ',' << s.n;
  out << '\n';
}

}  // namespace crossflow
