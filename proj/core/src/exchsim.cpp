#include "crossflow/exchsim.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

using json = nlohmann::json;

namespace crossflow {

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::SubmitLimit: return "submit_limit";
    case EventKind::Cancel: return "cancel";
    case EventKind::SubmitMarket: return "submit_market";
  }
  throw std::logic_error("bad EventKind");
}

EventKind event_kind_from_string(const std::string& s) {
  if (s == "submit_limit") return EventKind::SubmitLimit;
  if (s == "cancel") return EventKind::Cancel;
  if (s == "submit_market") return EventKind::SubmitMarket;
  throw std::invalid_argument("unknown event kind: " + s);
}

std::optional<double> BookL3::best_bid() const {
  if (bids_.empty()) return std::nullopt;
  return bids_.begin()->first;
}

std::optional<double> BookL3::best_ask() const {
  if (asks_.empty()) return std::nullopt;
  return asks_.begin()->first;
}

double BookL3::top_size(Side side) const {
  auto sum = [](const auto& level) {
    double total = 0.0;
    for (const auto& o : level) total += o.size_usd;
    return total;
  };
  if (side == Side::Buy)
    return bids_.empty() ? 0.0 : sum(bids_.begin()->second);
  return asks_.empty() ? 0.0 : sum(asks_.begin()->second);
}

std::optional<double> BookL3::microprice() const {
  if (bids_.empty() || asks_.empty()) return std::nullopt;
  return crossflow::microprice(bids_.begin()->first, top_size(Side::Buy),
                               asks_.begin()->first, top_size(Side::Sell));
}

double microprice(double bid_price, double bid_size, double ask_price,
                  double ask_size) {
  return (bid_price * bid_size + ask_price * ask_size) /
         (bid_size + ask_size);
}

const std::deque<RestingOrder>* BookL3::level(Side side, double price) const {
  if (side == Side::Buy) {
    const auto it = bids_.find(price);
    return it == bids_.end() ? nullptr : &it->second;
  }
  const auto it = asks_.find(price);
  return it == asks_.end() ? nullptr : &it->second;
}

bool BookL3::has_order(std::int64_t order_id) const {
  return index_.count(order_id) > 0;
}

double BookL3::remaining_size(std::int64_t order_id) const {
  const auto it = index_.find(order_id);
  if (it == index_.end()) return 0.0;
  const auto* lvl = level(it->second.first, it->second.second);
  for (const auto& o : *lvl)
    if (o.order_id == order_id) return o.size_usd;
  return 0.0;
}

bool BookL3::crossed() const {
  return !bids_.empty() && !asks_.empty() &&
         bids_.begin()->first >= asks_.begin()->first;
}

std::vector<SimFill> BookL3::match(Side taker_side, double size_usd,
                                   std::optional<double> limit_price,
                                   const SimEvent& event) {
  std::vector<SimFill> fills;
  double remaining = size_usd;
  auto consume = [&](auto& side_map, auto price_ok) {
    while (remaining > 0.0 && !side_map.empty()) {
      auto lvl_it = side_map.begin();
      if (!price_ok(lvl_it->first)) break;
      auto& queue = lvl_it->second;
      while (remaining > 0.0 && !queue.empty()) {
        RestingOrder& maker = queue.front();
        const double take = std::min(remaining, maker.size_usd);
        fills.push_back({event.ts_ms, event.seq, maker.order_id, maker.owner,
                         taker_side, lvl_it->first, take});
        maker.size_usd -= take;
        remaining -= take;
        if (maker.size_usd <= 0.0) {
          index_.erase(maker.order_id);
          queue.pop_front();
        }
      }
      if (queue.empty()) side_map.erase(lvl_it);
    }
  };
  if (taker_side == Side::Buy) {
    consume(asks_, [&](double p) { return !limit_price || p <= *limit_price; });
  } else {
    consume(bids_, [&](double p) { return !limit_price || p >= *limit_price; });
  }
  // rest the remainder of a limit order
  if (limit_price && remaining > 0.0) {
    RestingOrder rest{event.order_id, event.owner, remaining, event.seq};
    if (taker_side == Side::Buy)
      bids_[*limit_price].push_back(rest);
    else
      asks_[*limit_price].push_back(rest);
    index_[event.order_id] = {taker_side, *limit_price};
  }
  return fills;
}

std::vector<SimFill> BookL3::apply_event(const SimEvent& event) {
  switch (event.kind) {
    case EventKind::SubmitMarket:
      return match(event.side, event.size_usd, std::nullopt, event);
    case EventKind::SubmitLimit:
      if (event.order_id != 0 && index_.count(event.order_id))
        throw std::invalid_argument("duplicate order id " +
                                    std::to_string(event.order_id));
      return match(event.side, event.size_usd, event.price, event);
    case EventKind::Cancel: {
      const auto it = index_.find(event.order_id);
      if (it == index_.end()) {
        diag_.push_back("cancel of unknown or filled order " +
                        std::to_string(event.order_id));
        return {};
      }
      auto& side_map_entry = it->second;
      auto erase_from = [&](auto& side_map) {
        auto lvl_it = side_map.find(side_map_entry.second);
        auto& queue = lvl_it->second;
        for (auto o = queue.begin(); o != queue.end(); ++o) {
          if (o->order_id == event.order_id) {
            queue.erase(o);
            break;
          }
        }
        if (queue.empty()) side_map.erase(lvl_it);
      };
      if (side_map_entry.first == Side::Buy)
        erase_from(bids_);
      else
        erase_from(asks_);
      index_.erase(it);
      return {};
    }
  }
  throw std::logic_error("bad EventKind");
}

double TokenBucket::available(std::int64_t ts_ms) {
  refill(ts_ms);
  return tokens_;
}

bool TokenBucket::try_consume(std::int64_t ts_ms) {
  refill(ts_ms);
  if (tokens_ < 1.0) return false;
  tokens_ -= 1.0;
  return true;
}

void TokenBucket::refill(std::int64_t ts_ms) {
  if (!started_) {
    started_ = true;
    last_ts_ = ts_ms;
    return;
  }
  if (ts_ms <= last_ts_) return;
  tokens_ = std::min(capacity_,
                     tokens_ + refill_per_min_ *
                                   static_cast<double>(ts_ms - last_ts_) /
                                   60000.0);
  last_ts_ = ts_ms;
}

std::vector<SimEvent> read_events_ndjson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::vector<SimEvent> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    SimEvent e;
    e.seq = j.at("seq").get<std::int64_t>();
    e.ts_ms = j.at("ts").get<std::int64_t>();
    e.kind = event_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("side")) e.side = side_from_string(j.at("side").get<std::string>());
    if (j.contains("price")) e.price = j.at("price").get<double>();
    if (j.contains("size")) e.size_usd = j.at("size").get<double>();
    if (j.contains("order_id")) e.order_id = j.at("order_id").get<std::int64_t>();
    if (j.contains("owner")) e.owner = j.at("owner").get<std::string>();
    out.push_back(std::move(e));
  }
  return out;
}

void write_events_ndjson(const std::vector<SimEvent>& events,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const auto& e : events) {
    json j;
    j["seq"] = e.seq;
    j["ts"] = e.ts_ms;
    j["kind"] = to_string(e.kind);
    if (e.kind != EventKind::Cancel) {
      j["side"] = to_string(e.side);
      j["size"] = e.size_usd;
    }
    if (e.kind == EventKind::SubmitLimit) j["price"] = e.price;
    if (e.order_id != 0) j["order_id"] = e.order_id;
    if (!e.owner.empty()) j["owner"] = e.owner;
    out << j.dump() << '\n';
  }
}

}  // namespace crossflow
