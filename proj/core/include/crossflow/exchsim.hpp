#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crossflow/marketdata.hpp"

namespace crossflow {

enum class EventKind { SubmitLimit, Cancel, SubmitMarket };

std::string to_string(EventKind k);
EventKind event_kind_from_string(const std::string& s);

struct SimEvent {
  std::int64_t seq = 0;  // strictly increasing
  std::int64_t ts_ms = 0;
  EventKind kind = EventKind::SubmitLimit;
  Side side = Side::Buy;
  double price = 0.0;    // limit orders only
  double size_usd = 0.0; // submits only
  std::int64_t order_id = 0;
  std::string owner;     // empty = anonymous market flow
};

struct SimFill {
  std::int64_t ts_ms = 0;
  std::int64_t seq = 0;           // event that caused the fill
  std::int64_t maker_order_id = 0;
  std::string maker_owner;
  Side taker_side = Side::Buy;
  double price = 0.0;             // resting order's level price
  double size_usd = 0.0;
};

struct RestingOrder {
  std::int64_t order_id = 0;
  std::string owner;
  double size_usd = 0.0;
  std::int64_t seq = 0;  // arrival sequence, FIFO within a level
};

/// Price-time-priority limit order book; cancels reference live orders by
/// id, unknown cancels are no-ops recorded as diagnostics (the strategy /
/// exchange cancellation race).
class BookL3 {
 public:
  /// Applies one event and returns the fills it caused.
  std::vector<SimFill> apply_event(const SimEvent& event);

  std::optional<double> best_bid() const;
  std::optional<double> best_ask() const;
  double top_size(Side side) const;  // 0 when side empty
  std::optional<double> microprice() const;

  const std::deque<RestingOrder>* level(Side side, double price) const;
  bool has_order(std::int64_t order_id) const;
  double remaining_size(std::int64_t order_id) const;  // 0 if gone

  const std::vector<std::string>& diagnostics() const { return diag_; }
  bool crossed() const;

 private:
  std::vector<SimFill> match(Side taker_side, double size_usd,
                             std::optional<double> limit_price,
                             const SimEvent& event);

  std::map<double, std::deque<RestingOrder>, std::greater<double>> bids_;
  std::map<double, std::deque<RestingOrder>> asks_;
  std::map<std::int64_t, std::pair<Side, double>> index_;  // id -> side, price
  std::vector<std::string> diag_;
};

/// Size-weighted top of book, each price weighted by its own side's size:
/// (p_bid * bid_size + p_ask * ask_size) / (bid_size + ask_size).
double microprice(double bid_price, double bid_size, double ask_price,
                  double ask_size);

/// Continuous-refill token bucket; submit/cancel actions each consume one
/// token.
class TokenBucket {
 public:
  TokenBucket(double capacity, double refill_per_minute)
      : capacity_(capacity), refill_per_min_(refill_per_minute),
        tokens_(capacity) {}

  double available(std::int64_t ts_ms);
  bool try_consume(std::int64_t ts_ms);

 private:
  void refill(std::int64_t ts_ms);

  double capacity_;
  double refill_per_min_;
  double tokens_;
  std::int64_t last_ts_ = 0;
  bool started_ = false;
};

std::vector<SimEvent> read_events_ndjson(const std::string& path);
void write_events_ndjson(const std::vector<SimEvent>& events,
                         const std::string& path);

}  // namespace crossflow
