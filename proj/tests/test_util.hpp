#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crossflow/marketdata.hpp"

namespace crossflow::testutil {

// Panel with only vwap price paths (no books, no volumes); enough for
// PRET / DIV / fret computations.
inline SampledPanel vwap_panel(
    std::int64_t grid_ms,
    const std::map<std::string, std::vector<std::optional<double>>>& vwaps) {
  SampledPanel panel;
  panel.grid_ms = grid_ms;
  std::size_t n = 0;
  for (const auto& [id, v] : vwaps) n = v.size();
  for (std::size_t k = 0; k < n; ++k)
    panel.ts.push_back(static_cast<std::int64_t>(k + 1) * grid_ms);
  for (const auto& [id, v] : vwaps) {
    MarketSeries series;
    series.books.book_idx.assign(n, -1);
    series.trades.buy_volume_usd.assign(n, 0.0);
    series.trades.sell_volume_usd.assign(n, 0.0);
    series.trades.vwap = v;
    panel.markets[id] = std::move(series);
  }
  return panel;
}

// Same-price book with the given top sizes, `levels` deep on each side.
inline BookSnapshot simple_book(std::int64_t ts, double bid, double ask,
                                double bid_sz, double ask_sz,
                                int levels = 1, double tick = 0.5) {
  BookSnapshot b;
  b.ts_ms = ts;
  b.market_id = "m";
  for (int l = 0; l < levels; ++l) {
    b.bids.push_back({bid - l * tick, bid_sz});
    b.asks.push_back({ask + l * tick, ask_sz});
  }
  return b;
}

}  // namespace crossflow::testutil
