#include <doctest.h>

#include <cmath>

#include "crossflow/datagen.hpp"
#include "crossflow/exchsim.hpp"

using namespace crossflow;

TEST_CASE("panel generator is deterministic per seed") {
  GenConfig cfg;
  cfg.seed = 21;
  cfg.duration_ms = 5000;
  const GenOutput a = gen_panel(cfg);
  const GenOutput b = gen_panel(cfg);
  for (const auto& [id, books] : a.books) {
    const auto& other = b.books.at(id);
    REQUIRE(other.size() == books.size());
    for (std::size_t k = 0; k < books.size(); ++k) {
      CHECK(books[k].ts_ms == other[k].ts_ms);
      CHECK(books[k].bids == other[k].bids);
      CHECK(books[k].asks == other[k].asks);
    }
  }
  for (const auto& [id, trades] : a.trades) {
    const auto& other = b.trades.at(id);
    REQUIRE(other.size() == trades.size());
    for (std::size_t k = 0; k < trades.size(); ++k) {
      CHECK(trades[k].ts_ms == other[k].ts_ms);
      CHECK(trades[k].price == other[k].price);
      CHECK(trades[k].amount_usd == other[k].amount_usd);
      CHECK(trades[k].side == other[k].side);
    }
  }
}

TEST_CASE("generated books satisfy snapshot invariants") {
  GenConfig cfg;
  cfg.seed = 22;
  cfg.duration_ms = 10000;
  const GenOutput out = gen_panel(cfg);
  for (const auto& [id, books] : out.books)
    for (const auto& b : books) {
      std::string reason;
      CHECK_MESSAGE(b.valid(&reason), reason);
    }
}

TEST_CASE("config validation rejects inconsistent setups") {
  GenConfig cfg;
  cfg.n_markets = 3;  // lag_ms still has 4 entries
  CHECK_THROWS(gen_panel(cfg));
  GenConfig bad;
  bad.informedness = 1.5;
  CHECK_THROWS(gen_panel(bad));
}

TEST_CASE("l3 replay reconstructs the recorded book state at every sample") {
  L3GenConfig cfg;
  cfg.seed = 23;
  cfg.duration_ms = 60000;
  cfg.collapse_every_ms = 10000;
  const L3GenOutput out = gen_l3_events(cfg);
  REQUIRE(!out.sample_ts.empty());
  CHECK(out.n_collapses == 6);

  BookL3 book;
  std::size_t e = 0;
  for (std::size_t k = 0; k < out.sample_ts.size(); ++k) {
    while (e < out.events.size() && out.events[e].ts_ms <= out.sample_ts[k])
      book.apply_event(out.events[e++]);
    REQUIRE(book.best_ask().has_value());
    REQUIRE(book.best_bid().has_value());
    CHECK(*book.best_ask() == out.top_ask_price[k]);
    CHECK(*book.best_bid() == out.top_bid_price[k]);
    CHECK(book.top_size(Side::Sell) == out.top_ask_size[k]);
    CHECK(book.top_size(Side::Buy) == out.top_bid_size[k]);
  }
  CHECK(e == out.events.size());
  CHECK(!book.crossed());
}

TEST_CASE("quiet configuration generates no taker flow") {
  L3GenConfig cfg;
  cfg.seed = 24;
  cfg.duration_ms = 20000;
  cfg.collapse_every_ms = 0;
  cfg.benign_every_ms = 0;
  cfg.sweeps = false;
  const L3GenOutput out = gen_l3_events(cfg);
  BookL3 book;
  std::size_t fills = 0;
  for (const auto& ev : out.events) {
    CHECK(ev.kind != EventKind::SubmitMarket);
    fills += book.apply_event(ev).size();
  }
  CHECK(fills == 0);
  CHECK(out.n_collapses == 0);
}

TEST_CASE("planted predictions precede every collapse") {
  L3GenConfig cfg;
  cfg.seed = 25;
  cfg.duration_ms = 60000;
  cfg.collapse_every_ms = 10000;
  const L3GenOutput out = gen_l3_events(cfg);
  for (std::size_t k = 0; k < out.sample_ts.size(); ++k) {
    const std::int64_t ts = out.sample_ts[k];
    const std::int64_t to_next =
        ((ts + cfg.collapse_every_ms - 1) / cfg.collapse_every_ms) *
            cfg.collapse_every_ms -
        ts;
    if (to_next <= cfg.signal_lead_ms &&
        ts + to_next <= cfg.duration_ms)
      CHECK(out.predictions[k] >= cfg.prediction_signal);
    else
      CHECK(std::abs(out.predictions[k]) <= 1.0);
  }
}

TEST_CASE("l3 generator is deterministic per seed") {
  L3GenConfig cfg;
  cfg.seed = 26;
  cfg.duration_ms = 30000;
  cfg.sweeps = true;
  cfg.benign_every_ms = 2000;
  const L3GenOutput a = gen_l3_events(cfg);
  const L3GenOutput b = gen_l3_events(cfg);
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t k = 0; k < a.events.size(); ++k) {
    CHECK(a.events[k].seq == b.events[k].seq);
    CHECK(a.events[k].price == b.events[k].price);
    CHECK(a.events[k].size_usd == b.events[k].size_usd);
  }
  CHECK(a.predictions == b.predictions);
}
