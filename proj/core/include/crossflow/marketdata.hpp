#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace crossflow {

enum class InstrumentKind { Spot, Perpetual, Futures };
enum class MarginKind { BTC, USDT, Cross, None };
enum class Side { Buy, Sell };

std::string to_string(InstrumentKind k);
std::string to_string(MarginKind m);
std::string to_string(Side s);
InstrumentKind instrument_kind_from_string(const std::string& s);
MarginKind margin_kind_from_string(const std::string& s);
Side side_from_string(const std::string& s);

/// Static per-market properties: contract type, tick size and the taker
/// fee tiers (basis points) used by the PnL calculations.
struct MarketSpec {
  std::string market_id;
  InstrumentKind instrument_kind = InstrumentKind::Perpetual;
  MarginKind margin = MarginKind::BTC;
  double tick_size = 0.5;
  double taker_fee_default_bpts = 5.0;
  double taker_fee_vip_bpts = 5.0;
  double maker_rebate_bpts = 0.0;

  void validate() const;  // throws std::invalid_argument
};

struct BookLevel {
  double price = 0.0;
  double size_usd = 0.0;

  bool operator==(const BookLevel&) const = default;
};

struct BookSnapshot {
  std::int64_t ts_ms = 0;
  std::string market_id;
  std::vector<BookLevel> bids;  // prices strictly descending
  std::vector<BookLevel> asks;  // prices strictly ascending

  bool valid(std::string* reason = nullptr) const;
  double best_bid() const { return bids.front().price; }
  double best_ask() const { return asks.front().price; }
};

struct TradeTick {
  std::int64_t ts_ms = 0;
  std::string market_id;
  Side side = Side::Buy;
  double price = 0.0;
  double amount_usd = 0.0;

  bool valid(std::string* reason = nullptr) const;
};

struct RejectedRecord {
  std::size_t input_index = 0;
  std::string reason;
};

/// Uniform grid of timestamps k * grid_ms covering (t_min, t_max]:
/// first point is the smallest multiple of grid_ms strictly greater
/// than t_min, last point the smallest multiple >= t_max.
std::vector<std::int64_t> make_grid(std::int64_t t_min, std::int64_t t_max,
                                    std::int64_t grid_ms);

/// Book series aligned to a grid. Snapshots are stored once; book_idx
/// holds, per grid point, the index of the last snapshot with
/// ts <= grid point, or -1 before the first snapshot (warm-up).
struct AlignedBookSeries {
  std::vector<BookSnapshot> snapshots;
  std::vector<int> book_idx;

  const BookSnapshot* at(std::size_t grid_pos) const {
    const int idx = book_idx[grid_pos];
    return idx < 0 ? nullptr : &snapshots[idx];
  }
};

/// Per-bucket trade aggregates over the same grid; buckets are
/// half-open (t - grid_ms, t].
struct TradeBuckets {
  std::vector<double> buy_volume_usd;
  std::vector<double> sell_volume_usd;
  std::vector<std::optional<double>> vwap;  // forward filled; absent before first trade
};

AlignedBookSeries resample_books(const std::vector<BookSnapshot>& snapshots,
                                 const std::vector<std::int64_t>& grid,
                                 std::vector<RejectedRecord>* rejected = nullptr);

TradeBuckets aggregate_trades(const std::vector<TradeTick>& ticks,
                              const std::vector<std::int64_t>& grid,
                              std::int64_t grid_ms,
                              std::vector<RejectedRecord>* rejected = nullptr);

/// Convert a contract amount to USD notional. BTC-valued contracts are
/// converted with the last seen Bitcoin price (must be > 0).
double normalize_usd(double amount, double contract_value, bool value_in_btc,
                     double last_btc_price);

struct MarketSeries {
  AlignedBookSeries books;
  TradeBuckets trades;
};

/// Time-aligned panel of per-market book and trade aggregates on a fixed
/// grid; the substrate for all feature computation.
struct SampledPanel {
  std::int64_t grid_ms = 50;
  std::vector<std::int64_t> ts;
  std::map<std::string, MarketSeries> markets;

  std::size_t n_samples() const { return ts.size(); }

  /// Position of grid timestamp t, or -1.
  int index_of(std::int64_t t) const;
};

SampledPanel build_panel(
    const std::map<std::string, std::vector<BookSnapshot>>& books,
    const std::map<std::string, std::vector<TradeTick>>& trades,
    std::int64_t grid_ms, std::vector<RejectedRecord>* rejected = nullptr);

// --- NDJSON wire format ------------------------------------------------

std::vector<BookSnapshot> read_books_ndjson(const std::string& path);
std::vector<TradeTick> read_trades_ndjson(const std::string& path);
void write_books_ndjson(const std::vector<BookSnapshot>& snapshots,
                        const std::string& path);
void write_trades_ndjson(const std::vector<TradeTick>& ticks,
                         const std::string& path);

// --- Columnar panel file ----------------------------------------------

/// CSV with a ts_ms column plus "<market>.<field>" columns; books are
/// flattened to at most `max_depth` levels per side. Round-trips bit
/// exactly through read_panel_csv for books within that depth.
void write_panel_csv(const SampledPanel& panel, const std::string& path,
                     std::size_t max_depth = 20);
SampledPanel read_panel_csv(const std::string& path);

}  // namespace crossflow
