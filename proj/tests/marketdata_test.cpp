#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "crossflow/datagen.hpp"
#include "crossflow/marketdata.hpp"
#include "test_util.hpp"

using namespace crossflow;
using testutil::simple_book;

TEST_CASE("make_grid covers (t_min, t_max] with multiples of grid_ms") {
  CHECK(make_grid(0, 130, 50) == std::vector<std::int64_t>{50, 100, 150});
  CHECK(make_grid(0, 150, 50) == std::vector<std::int64_t>{50, 100, 150});
  CHECK(make_grid(10, 60, 50) == std::vector<std::int64_t>{50, 100});
  CHECK(make_grid(50, 50, 50).empty());
}

TEST_CASE("resample_books carries the last snapshot at or before each grid point") {
  std::vector<BookSnapshot> snaps = {simple_book(0, 99, 100, 10, 10),
                                     simple_book(40, 98, 99, 10, 10),
                                     simple_book(130, 97, 98, 10, 10)};
  const auto grid = make_grid(0, 130, 50);
  const auto series = resample_books(snaps, grid);
  REQUIRE(grid.size() == 3);
  CHECK(series.at(0)->ts_ms == 40);
  CHECK(series.at(1)->ts_ms == 40);
  CHECK(series.at(2)->ts_ms == 130);
}

TEST_CASE("single snapshot forward fills every grid point") {
  std::vector<BookSnapshot> snaps = {simple_book(0, 99, 100, 10, 10)};
  const std::vector<std::int64_t> grid = {50, 100, 150, 200};
  const auto series = resample_books(snaps, grid);
  for (std::size_t g = 0; g < grid.size(); ++g)
    CHECK(series.at(g)->ts_ms == 0);
}

TEST_CASE("grid points before the first snapshot are absent (warm-up)") {
  std::vector<BookSnapshot> snaps = {simple_book(120, 99, 100, 10, 10)};
  const std::vector<std::int64_t> grid = {50, 100, 150};
  const auto series = resample_books(snaps, grid);
  CHECK(series.at(0) == nullptr);
  CHECK(series.at(1) == nullptr);
  CHECK(series.at(2) != nullptr);
}

TEST_CASE("crossed snapshot is rejected and the series unaffected") {
  std::vector<BookSnapshot> snaps = {simple_book(0, 99, 100, 10, 10),
                                     simple_book(40, 101, 100, 10, 10),
                                     simple_book(80, 98, 99, 10, 10)};
  std::vector<RejectedRecord> rejected;
  const auto series = resample_books(snaps, {50, 100}, &rejected);
  REQUIRE(rejected.size() == 1);
  CHECK(rejected[0].input_index == 1);
  CHECK(series.at(0)->ts_ms == 0);
  CHECK(series.at(1)->ts_ms == 80);
}

TEST_CASE("resampling an already grid-aligned series is idempotent") {
  std::vector<BookSnapshot> snaps;
  for (int k = 1; k <= 5; ++k)
    snaps.push_back(simple_book(50 * k, 99 - k, 100 + k, 10, 10));
  const std::vector<std::int64_t> grid = {50, 100, 150, 200, 250};
  const auto series = resample_books(snaps, grid);
  for (std::size_t g = 0; g < grid.size(); ++g)
    CHECK(series.at(g)->ts_ms == grid[g]);
}

TEST_CASE("aggregate_trades buckets, vwap and forward fill") {
  std::vector<TradeTick> ticks = {
      {30, "m", Side::Buy, 100.0, 1000.0},
      {50, "m", Side::Sell, 102.0, 3000.0},
  };
  const std::vector<std::int64_t> grid = {50, 100, 150};
  const auto buckets = aggregate_trades(ticks, grid, 50);
  CHECK(buckets.buy_volume_usd[0] == 1000.0);
  CHECK(buckets.sell_volume_usd[0] == 3000.0);
  CHECK(*buckets.vwap[0] ==
        doctest::Approx((100.0 * 1000 + 102.0 * 3000) / 4000).epsilon(1e-12));
  // empty buckets: volumes zero, vwap forward filled
  CHECK(buckets.buy_volume_usd[1] == 0.0);
  CHECK(buckets.sell_volume_usd[1] == 0.0);
  CHECK(*buckets.vwap[1] == *buckets.vwap[0]);
  CHECK(*buckets.vwap[2] == *buckets.vwap[0]);
}

TEST_CASE("single trade vwap equals its price; volume conserved") {
  std::vector<TradeTick> ticks;
  double total = 0.0;
  for (int k = 0; k < 57; ++k) {
    const double amt = 100.0 + k;
    // ts starts at 1: the grid covers (0, 600], a tick at 0 would fall out
    ticks.push_back({k * 9 + 1, "m", k % 2 ? Side::Buy : Side::Sell,
                     100.0 + 0.1 * k, amt});
    total += amt;
  }
  const auto grid = make_grid(0, 600, 50);
  const auto buckets = aggregate_trades(ticks, grid, 50);
  double sum = 0.0;
  for (std::size_t g = 0; g < grid.size(); ++g)
    sum += buckets.buy_volume_usd[g] + buckets.sell_volume_usd[g];
  CHECK(sum == doctest::Approx(total).epsilon(1e-12));

  const auto one = aggregate_trades({{10, "m", Side::Buy, 101.25, 500.0}},
                                    {50}, 50);
  CHECK(*one.vwap[0] == 101.25);
}

TEST_CASE("bucket vwap lies within the bucket's price range") {
  std::vector<TradeTick> ticks = {{10, "m", Side::Buy, 100.0, 100.0},
                                  {20, "m", Side::Sell, 105.0, 900.0},
                                  {40, "m", Side::Buy, 95.0, 50.0}};
  const auto buckets = aggregate_trades(ticks, {50}, 50);
  CHECK(*buckets.vwap[0] >= 95.0);
  CHECK(*buckets.vwap[0] <= 105.0);
}

TEST_CASE("normalize_usd handles USD and BTC contract values") {
  CHECK(normalize_usd(5, 100.0, false, 0.0) == 500.0);
  CHECK(normalize_usd(2, 0.001, true, 50000.0) == doctest::Approx(100.0));
  CHECK(normalize_usd(0, 100.0, false, 0.0) == 0.0);
  CHECK_THROWS(normalize_usd(1, 0.001, true, 0.0));
}

TEST_CASE("panel csv round-trips bit exactly") {
  GenConfig cfg;
  cfg.seed = 42;
  cfg.duration_ms = 5000;
  const GenOutput out = gen_panel(cfg);
  const SampledPanel panel = build_panel(out.books, out.trades, 50);

  const std::string p1 = "test_panel_a.csv";
  const std::string p2 = "test_panel_b.csv";
  write_panel_csv(panel, p1);
  const SampledPanel back = read_panel_csv(p1);
  write_panel_csv(back, p2);

  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  CHECK(slurp(p1) == slurp(p2));
  CHECK(back.ts == panel.ts);
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("books and trades ndjson round-trip") {
  GenConfig cfg;
  cfg.seed = 9;
  cfg.duration_ms = 2000;
  cfg.n_markets = 1;
  cfg.lag_ms = {0};
  const GenOutput out = gen_panel(cfg);
  const auto& books = out.books.at("mkt0");
  const auto& trades = out.trades.at("mkt0");

  write_books_ndjson(books, "test_books.ndjson");
  write_trades_ndjson(trades, "test_trades.ndjson");
  const auto books2 = read_books_ndjson("test_books.ndjson");
  const auto trades2 = read_trades_ndjson("test_trades.ndjson");
  REQUIRE(books2.size() == books.size());
  REQUIRE(trades2.size() == trades.size());
  for (std::size_t k = 0; k < books.size(); ++k) {
    CHECK(books2[k].ts_ms == books[k].ts_ms);
    CHECK(books2[k].bids == books[k].bids);
    CHECK(books2[k].asks == books[k].asks);
  }
  for (std::size_t k = 0; k < trades.size(); ++k) {
    CHECK(trades2[k].ts_ms == trades[k].ts_ms);
    CHECK(trades2[k].price == trades[k].price);
    CHECK(trades2[k].amount_usd == trades[k].amount_usd);
  }
  std::remove("test_books.ndjson");
  std::remove("test_trades.ndjson");
}
