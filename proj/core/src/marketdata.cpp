#include "crossflow/marketdata.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "crossflow/csv.hpp"

using json = nlohmann::json;

namespace crossflow {

std::string to_string(InstrumentKind k) {
  switch (k) {
    case InstrumentKind::Spot: return "spot";
    case InstrumentKind::Perpetual: return "perpetual";
    case InstrumentKind::Futures: return "futures";
  }
  throw std::logic_error("bad InstrumentKind");
}

std::string to_string(MarginKind m) {
  switch (m) {
    case MarginKind::BTC: return "btc";
    case MarginKind::USDT: return "usdt";
    case MarginKind::Cross: return "cross";
    case MarginKind::None: return "none";
  }
  throw std::logic_error("bad MarginKind");
}

std::string to_string(Side s) { return s == Side::Buy ? "buy" : "sell"; }

InstrumentKind instrument_kind_from_string(const std::string& s) {
  if (s == "spot") return InstrumentKind::Spot;
  if (s == "perpetual") return InstrumentKind::Perpetual;
  if (s == "futures") return InstrumentKind::Futures;
  throw std::invalid_argument("unknown instrument kind: " + s);
}

MarginKind margin_kind_from_string(const std::string& s) {
  if (s == "btc") return MarginKind::BTC;
  if (s == "usdt") return MarginKind::USDT;
  if (s == "cross") return MarginKind::Cross;
  if (s == "none") return MarginKind::None;
  throw std::invalid_argument("unknown margin kind: " + s);
}

Side side_from_string(const std::string& s) {
  if (s == "buy") return Side::Buy;
  if (s == "sell") return Side::Sell;
  throw std::invalid_argument("unknown side: " + s);
}

void MarketSpec::validate() const {
  if (market_id.empty()) throw std::invalid_argument("empty market_id");
  if (tick_size <= 0.0) throw std::invalid_argument("tick_size must be > 0");
  if (taker_fee_default_bpts < 0.0 || taker_fee_vip_bpts < 0.0)
    throw std::invalid_argument("negative taker fee");
}

bool BookSnapshot::valid(std::string* reason) const {
  auto fail = [&](const char* why) {
    if (reason) *reason = why;
    return false;
  };
  if (bids.empty() || asks.empty()) return fail("empty book side");
  for (const auto& lvl : bids)
    if (!(lvl.price > 0.0) || !(lvl.size_usd > 0.0))
      return fail("non-positive bid level");
  for (const auto& lvl : asks)
    if (!(lvl.price > 0.0) || !(lvl.size_usd > 0.0))
      return fail("non-positive ask level");
  for (std::size_t i = 1; i < bids.size(); ++i)
    if (!(bids[i].price < bids[i - 1].price)) return fail("bids not descending");
  for (std::size_t i = 1; i < asks.size(); ++i)
    if (!(asks[i].price > asks[i - 1].price)) return fail("asks not ascending");
  if (!(bids.front().price < asks.front().price)) return fail("crossed book");
  return true;
}

bool TradeTick::valid(std::string* reason) const {
  auto fail = [&](const char* why) {
    if (reason) *reason = why;
    return false;
  };
  if (!(price > 0.0)) return fail("non-positive trade price");
  if (!(amount_usd > 0.0)) return fail("non-positive trade amount");
  return true;
}

std::vector<std::int64_t> make_grid(std::int64_t t_min, std::int64_t t_max,
                                    std::int64_t grid_ms) {
  if (grid_ms <= 0) throw std::invalid_argument("grid_ms must be > 0");
  if (t_max < t_min) return {};
  // smallest multiple of grid_ms strictly greater than t_min
  std::int64_t k = t_min / grid_ms + 1;
  if (t_min < 0 && t_min % grid_ms != 0) --k;
  std::vector<std::int64_t> grid;
  for (std::int64_t t = k * grid_ms; t - grid_ms < t_max; t += grid_ms)
    grid.push_back(t);
  return grid;
}

AlignedBookSeries resample_books(const std::vector<BookSnapshot>& snapshots,
                                 const std::vector<std::int64_t>& grid,
                                 std::vector<RejectedRecord>* rejected) {
  AlignedBookSeries out;
  out.snapshots.reserve(snapshots.size());
  std::string reason;
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const auto& snap = snapshots[i];
    if (!snap.valid(&reason)) {
      if (rejected) rejected->push_back({i, reason});
      continue;
    }
    if (!out.snapshots.empty() && snap.ts_ms < out.snapshots.back().ts_ms) {
      if (rejected) rejected->push_back({i, "out-of-order timestamp"});
      continue;
    }
    out.snapshots.push_back(snap);
  }
  out.book_idx.assign(grid.size(), -1);
  std::size_t next = 0;
  int last = -1;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    while (next < out.snapshots.size() && out.snapshots[next].ts_ms <= grid[g])
      last = static_cast<int>(next++);
    out.book_idx[g] = last;
  }
  return out;
}

TradeBuckets aggregate_trades(const std::vector<TradeTick>& ticks,
                              const std::vector<std::int64_t>& grid,
                              std::int64_t grid_ms,
                              std::vector<RejectedRecord>* rejected) {
  std::vector<TradeTick> clean;
  clean.reserve(ticks.size());
  std::string reason;
  for (std::size_t i = 0; i < ticks.size(); ++i) {
    if (!ticks[i].valid(&reason)) {
      if (rejected) rejected->push_back({i, reason});
      continue;
    }
    if (!clean.empty() && ticks[i].ts_ms < clean.back().ts_ms) {
      if (rejected) rejected->push_back({i, "out-of-order timestamp"});
      continue;
    }
    clean.push_back(ticks[i]);
  }

  TradeBuckets out;
  out.buy_volume_usd.assign(grid.size(), 0.0);
  out.sell_volume_usd.assign(grid.size(), 0.0);
  out.vwap.assign(grid.size(), std::nullopt);
  std::size_t next = 0;
  std::optional<double> last_vwap;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const std::int64_t lo = grid[g] - grid_ms;  // bucket is (lo, grid[g]]
    while (next < clean.size() && clean[next].ts_ms <= lo) ++next;
    double notional = 0.0, px_weight = 0.0;
    while (next < clean.size() && clean[next].ts_ms <= grid[g]) {
      const auto& t = clean[next];
      (t.side == Side::Buy ? out.buy_volume_usd[g] : out.sell_volume_usd[g]) +=
          t.amount_usd;
      notional += t.amount_usd;
      px_weight += t.amount_usd * t.price;
      ++next;
    }
    if (notional > 0.0) last_vwap = px_weight / notional;
    out.vwap[g] = last_vwap;
  }
  return out;
}

double normalize_usd(double amount, double contract_value, bool value_in_btc,
                     double last_btc_price) {
  if (value_in_btc) {
    if (!(last_btc_price > 0.0))
      throw std::invalid_argument("BTC conversion requires a positive price");
    return amount * contract_value * last_btc_price;
  }
  return amount * contract_value;
}

int SampledPanel::index_of(std::int64_t t) const {
  if (ts.empty() || grid_ms <= 0) return -1;
  if (t < ts.front() || t > ts.back()) return -1;
  const std::int64_t off = t - ts.front();
  if (off % grid_ms != 0) return -1;
  return static_cast<int>(off / grid_ms);
}

SampledPanel build_panel(
    const std::map<std::string, std::vector<BookSnapshot>>& books,
    const std::map<std::string, std::vector<TradeTick>>& trades,
    std::int64_t grid_ms, std::vector<RejectedRecord>* rejected) {
  std::int64_t t_min = std::numeric_limits<std::int64_t>::max();
  std::int64_t t_max = std::numeric_limits<std::int64_t>::min();
  bool any = false;
  for (const auto& [id, snaps] : books)
    for (const auto& s : snaps) {
      t_min = std::min(t_min, s.ts_ms);
      t_max = std::max(t_max, s.ts_ms);
      any = true;
    }
  for (const auto& [id, ticks] : trades)
    for (const auto& t : ticks) {
      t_min = std::min(t_min, t.ts_ms);
      t_max = std::max(t_max, t.ts_ms);
      any = true;
    }

  SampledPanel panel;
  panel.grid_ms = grid_ms;
  if (!any) return panel;
  panel.ts = make_grid(t_min, t_max, grid_ms);

  static const std::vector<BookSnapshot> no_books;
  static const std::vector<TradeTick> no_trades;
  for (const auto& [id, snaps] : books) {
    auto& series = panel.markets[id];
    series.books = resample_books(snaps, panel.ts, rejected);
    const auto it = trades.find(id);
    series.trades = aggregate_trades(it == trades.end() ? no_trades : it->second,
                                     panel.ts, grid_ms, rejected);
  }
  for (const auto& [id, ticks] : trades) {
    if (panel.markets.count(id)) continue;
    auto& series = panel.markets[id];
    series.books = resample_books(no_books, panel.ts, rejected);
    series.trades = aggregate_trades(ticks, panel.ts, grid_ms, rejected);
  }
  return panel;
}

// --- NDJSON -------------------------------------------------------------

namespace {

json levels_to_json(const std::vector<BookLevel>& levels) {
  json arr = json::array();
  for (const auto& lvl : levels) arr.push_back({lvl.price, lvl.size_usd});
  return arr;
}

std::vector<BookLevel> levels_from_json(const json& arr) {
  std::vector<BookLevel> levels;
  for (const auto& item : arr)
    levels.push_back({item.at(0).get<double>(), item.at(1).get<double>()});
  return levels;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

}  // namespace

std::vector<BookSnapshot> read_books_ndjson(const std::string& path) {
  auto in = open_in(path);
  std::vector<BookSnapshot> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    BookSnapshot snap;
    snap.ts_ms = j.at("ts").get<std::int64_t>();
    snap.market_id = j.at("market").get<std::string>();
    snap.bids = levels_from_json(j.at("bids"));
    snap.asks = levels_from_json(j.at("asks"));
    out.push_back(std::move(snap));
  }
  return out;
}

void write_books_ndjson(const std::vector<BookSnapshot>& snapshots,
                        const std::string& path) {
  auto out = open_out(path);
  for (const auto& snap : snapshots) {
    json j;
    j["ts"] = snap.ts_ms;
    j["market"] = snap.market_id;
    j["bids"] = levels_to_json(snap.bids);
    j["asks"] = levels_to_json(snap.asks);
    out << j.dump() << '\n';
  }
}

std::vector<TradeTick> read_trades_ndjson(const std::string& path) {
  auto in = open_in(path);
  std::vector<TradeTick> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    TradeTick t;
    t.ts_ms = j.at("ts").get<std::int64_t>();
    t.market_id = j.at("market").get<std::string>();
    t.side = side_from_string(j.at("side").get<std::string>());
    t.price = j.at("price").get<double>();
    t.amount_usd = j.at("amount").get<double>();
    out.push_back(std::move(t));
  }
  return out;
}

void write_trades_ndjson(const std::vector<TradeTick>& ticks,
                         const std::string& path) {
  auto out = open_out(path);
  for (const auto& t : ticks) {
    json j;
    j["ts"] = t.ts_ms;
    j["market"] = t.market_id;
    j["side"] = to_string(t.side);
    j["price"] = t.price;
    j["amount"] = t.amount_usd;
    out << j.dump() << '\n';
  }
}

// --- Panel CSV ----------------------------------------------------------

void write_panel_csv(const SampledPanel& panel, const std::string& path,
                     std::size_t max_depth) {
  csv::Table table;
  table.columns.push_back("ts_ms");
  struct ColPlan {
    const MarketSeries* series;
    std::size_t depth;
  };
  std::vector<ColPlan> plans;
  for (const auto& [id, series] : panel.markets) {
    std::size_t depth = 0;
    for (const auto& snap : series.books.snapshots)
      depth = std::max({depth, snap.bids.size(), snap.asks.size()});
    depth = std::min(depth, max_depth);
    for (std::size_t l = 0; l < depth; ++l) {
      const std::string n = std::to_string(l + 1);
      table.columns.push_back(id + ".bid_px_" + n);
      table.columns.push_back(id + ".bid_sz_" + n);
      table.columns.push_back(id + ".ask_px_" + n);
      table.columns.push_back(id + ".ask_sz_" + n);
    }
    table.columns.push_back(id + ".buy_vol");
    table.columns.push_back(id + ".sell_vol");
    table.columns.push_back(id + ".vwap");
    plans.push_back({&series, depth});
  }

  table.rows.reserve(panel.n_samples());
  for (std::size_t g = 0; g < panel.n_samples(); ++g) {
    std::vector<std::optional<double>> row;
    row.reserve(table.columns.size());
    row.emplace_back(static_cast<double>(panel.ts[g]));
    for (const auto& plan : plans) {
      const BookSnapshot* snap = plan.series->books.at(g);
      for (std::size_t l = 0; l < plan.depth; ++l) {
        if (snap && l < snap->bids.size()) {
          row.emplace_back(snap->bids[l].price);
          row.emplace_back(snap->bids[l].size_usd);
        } else {
          row.emplace_back(std::nullopt);
          row.emplace_back(std::nullopt);
        }
        if (snap && l < snap->asks.size()) {
          row.emplace_back(snap->asks[l].price);
          row.emplace_back(snap->asks[l].size_usd);
        } else {
          row.emplace_back(std::nullopt);
          row.emplace_back(std::nullopt);
        }
      }
      row.emplace_back(plan.series->trades.buy_volume_usd[g]);
      row.emplace_back(plan.series->trades.sell_volume_usd[g]);
      row.emplace_back(plan.series->trades.vwap[g]);
    }
    table.rows.push_back(std::move(row));
  }
  csv::write(table, path);
}

SampledPanel read_panel_csv(const std::string& path) {
  const csv::Table table = csv::read(path);
  SampledPanel panel;
  if (table.columns.empty() || table.columns[0] != "ts_ms")
    throw std::runtime_error("panel csv must start with ts_ms column");

  panel.ts.reserve(table.n_rows());
  for (const auto& row : table.rows) {
    if (!row[0]) throw std::runtime_error("missing ts_ms value");
    panel.ts.push_back(static_cast<std::int64_t>(*row[0]));
  }
  if (panel.ts.size() >= 2) panel.grid_ms = panel.ts[1] - panel.ts[0];

  // group "<market>.<field>" columns by market
  struct MarketCols {
    std::vector<int> bid_px, bid_sz, ask_px, ask_sz;  // indexed by level
    int buy_vol = -1, sell_vol = -1, vwap = -1;
  };
  std::map<std::string, MarketCols> by_market;
  auto set_level = [](std::vector<int>& v, std::size_t level, int col) {
    if (v.size() < level) v.resize(level, -1);
    v[level - 1] = col;
  };
  for (std::size_t c = 1; c < table.columns.size(); ++c) {
    const std::string& name = table.columns[c];
    const std::size_t dot = name.rfind('.');
    if (dot == std::string::npos)
      throw std::runtime_error("bad panel column: " + name);
    const std::string market = name.substr(0, dot);
    const std::string field = name.substr(dot + 1);
    auto& cols = by_market[market];
    const int ci = static_cast<int>(c);
    if (field == "buy_vol") {
      cols.buy_vol = ci;
    } else if (field == "sell_vol") {
      cols.sell_vol = ci;
    } else if (field == "vwap") {
      cols.vwap = ci;
    } else {
      const std::size_t us = field.rfind('_');
      if (us == std::string::npos)
        throw std::runtime_error("bad panel column: " + name);
      const std::size_t level = std::stoul(field.substr(us + 1));
      const std::string kind = field.substr(0, us);
      if (kind == "bid_px") set_level(cols.bid_px, level, ci);
      else if (kind == "bid_sz") set_level(cols.bid_sz, level, ci);
      else if (kind == "ask_px") set_level(cols.ask_px, level, ci);
      else if (kind == "ask_sz") set_level(cols.ask_sz, level, ci);
      else throw std::runtime_error("bad panel column: " + name);
    }
  }

  for (const auto& [id, cols] : by_market) {
    auto& series = panel.markets[id];
    series.books.book_idx.assign(panel.ts.size(), -1);
    series.trades.buy_volume_usd.assign(panel.ts.size(), 0.0);
    series.trades.sell_volume_usd.assign(panel.ts.size(), 0.0);
    series.trades.vwap.assign(panel.ts.size(), std::nullopt);
    for (std::size_t g = 0; g < panel.ts.size(); ++g) {
      const auto& row = table.rows[g];
      BookSnapshot snap;
      snap.ts_ms = panel.ts[g];
      snap.market_id = id;
      for (std::size_t l = 0; l < cols.bid_px.size(); ++l) {
        const int pc = cols.bid_px[l], sc = l < cols.bid_sz.size() ? cols.bid_sz[l] : -1;
        if (pc < 0 || sc < 0 || !row[pc] || !row[sc]) break;
        snap.bids.push_back({*row[pc], *row[sc]});
      }
      for (std::size_t l = 0; l < cols.ask_px.size(); ++l) {
        const int pc = cols.ask_px[l], sc = l < cols.ask_sz.size() ? cols.ask_sz[l] : -1;
        if (pc < 0 || sc < 0 || !row[pc] || !row[sc]) break;
        snap.asks.push_back({*row[pc], *row[sc]});
      }
      if (!snap.bids.empty() || !snap.asks.empty()) {
        // identical consecutive forward-filled snapshots are re-expanded;
        // dedupe so the in-memory layout matches what write_panel_csv saw
        auto& snaps = series.books.snapshots;
        if (snaps.empty() || snaps.back().bids != snap.bids ||
            snaps.back().asks != snap.asks) {
          snaps.push_back(std::move(snap));
        }
        series.books.book_idx[g] = static_cast<int>(snaps.size()) - 1;
      }
      if (cols.buy_vol >= 0 && row[cols.buy_vol])
        series.trades.buy_volume_usd[g] = *row[cols.buy_vol];
      if (cols.sell_vol >= 0 && row[cols.sell_vol])
        series.trades.sell_volume_usd[g] = *row[cols.sell_vol];
      if (cols.vwap >= 0) series.trades.vwap[g] = row[cols.vwap];
    }
  }
  return panel;
}

}  // namespace crossflow
