#include <doctest.h>

#include <cstdio>

#include "crossflow/features.hpp"
#include "test_util.hpp"

using namespace crossflow;
using testutil::simple_book;
using testutil::vwap_panel;

TEST_CASE("classical imbalance") {
  CHECK(classical_imbalance(simple_book(0, 99, 100, 100, 100)) == 0.0);
  CHECK(classical_imbalance(simple_book(0, 99, 100, 169, 31)) ==
        doctest::Approx(0.69));
  CHECK(classical_imbalance(simple_book(0, 99, 100, 0.0001, 100)) ==
        doctest::Approx(-0.999998).epsilon(1e-6));
}

static BookSnapshot two_level_ask_book() {
  BookSnapshot b;
  b.ts_ms = 0;
  b.market_id = "m";
  b.bids = {{99.0, 1000.0}};
  b.asks = {{100.0, 300.0}, {101.0, 700.0}};
  return b;
}

TEST_CASE("avg_exec_price walks the book") {
  BookSnapshot b = two_level_ask_book();
  CHECK(*avg_exec_price(simple_book(0, 99, 100, 500, 500), BookSide::Ask, 1) ==
        100.0);
  CHECK(*avg_exec_price(b, BookSide::Ask, 500) ==
        doctest::Approx((300.0 * 100 + 200.0 * 101) / 500).epsilon(1e-12));
  CHECK(!avg_exec_price(b, BookSide::Ask, 2000).has_value());
  CHECK_THROWS(avg_exec_price(b, BookSide::Ask, 0.5));
}

TEST_CASE("imbalance in bpts") {
  BookSnapshot b = two_level_ask_book();
  CHECK(*imbalance(b, 1, BookSide::Ask) == 0.0);
  CHECK(*imbalance(b, 1, BookSide::Bid) == 0.0);
  CHECK(*imbalance(b, 500, BookSide::Ask) ==
        doctest::Approx((100.4 / 100.0 - 1) * 1e4).epsilon(1e-9));
  // single deep bid level: average price equals touch
  BookSnapshot deep = simple_book(0, 100, 101, 1000, 1000);
  CHECK(*imbalance(deep, 500, BookSide::Bid) == 0.0);
  // insufficient depth flagged as absent
  CHECK(!imbalance(b, 5000, BookSide::Ask).has_value());
}

static AlignedBookSeries constant_series(const BookSnapshot& b, int n) {
  AlignedBookSeries s;
  s.snapshots.push_back(b);
  s.book_idx.assign(n, 0);
  return s;
}

TEST_CASE("select_depth_N averages per-side medians of inside-band liquidity") {
  // 10k within 5 bpts on each side
  BookSnapshot b = simple_book(0, 9999, 10000, 10000, 10000, 1);
  CHECK(select_depth_N("m", constant_series(b, 7)).n_usd ==
        doctest::Approx(10000.0));

  // asks 8k, bids 12k inside the band -> N = 10000
  BookSnapshot c;
  c.ts_ms = 0;
  c.market_id = "m";
  c.bids = {{10000.0, 12000.0}, {9000.0, 50000.0}};  // 9000 outside 5 bpts
  c.asks = {{10001.0, 8000.0}, {11000.0, 50000.0}};
  CHECK(select_depth_N("m", constant_series(c, 7)).n_usd ==
        doctest::Approx(10000.0));
}

TEST_CASE("select_depth_N floors at one") {
  AlignedBookSeries empty;
  empty.book_idx.assign(5, -1);
  CHECK(select_depth_N("m", empty).n_usd == 1.0);
}

TEST_CASE("tfi sums signed flow over the trailing window") {
  SampledPanel panel = vwap_panel(50, {{"m", {100, 100, 100, 100}}});
  auto& tb = panel.markets.at("m").trades;
  tb.buy_volume_usd = {7000, 0, 500, 0};
  tb.sell_volume_usd = {2500, 0, 0, 3000};
  const Series s = tfi_series(panel, "m", 100);  // two buckets
  CHECK(!s[0].has_value());  // window extends past the grid start
  CHECK(*s[1] == 4500.0);
  CHECK(*s[2] == 500.0);
  CHECK(*s[3] == -2500.0);
}

TEST_CASE("pret on the vwap path") {
  SampledPanel panel = vwap_panel(50, {{"m", {100, 101, 99.99, 99.99}}});
  const Series s = pret_series(panel, "m", 50);
  CHECK(!s[0].has_value());
  CHECK(*s[1] == doctest::Approx(100.0).epsilon(1e-10));
  CHECK(*s[3] == 0.0);
  // undefined price before the first trade stays absent
  SampledPanel gap = vwap_panel(
      50, {{"m", {std::nullopt, std::nullopt, 100.0, 100.0}}});
  const Series g = pret_series(gap, "m", 50);
  CHECK(!g[2].has_value());
  CHECK(g[3].has_value());
}

TEST_CASE("div subtracts the rolling mean of the basis-point gap") {
  // d history 10, 10, 10, 14 bpts; window of 4 samples -> mean 11, DIV 3
  std::vector<std::optional<double>> pj = {100, 100, 100, 100};
  std::vector<std::optional<double>> pi;
  for (const double d : {10.0, 10.0, 10.0, 14.0})
    pi.push_back(100.0 * (1.0 + d * 1e-4));
  SampledPanel panel = vwap_panel(50, {{"i", pi}, {"j", pj}});
  const Series s = div_series(panel, "i", "j", 200);
  CHECK(!s[2].has_value());  // window does not fit yet
  CHECK(*s[3] == doctest::Approx(3.0).epsilon(1e-9));
  // i == j -> identically zero where defined
  const Series z = div_series(panel, "j", "j", 200);
  CHECK(*z[3] == 0.0);
  // constant gap -> zero
  SampledPanel flat = vwap_panel(
      50, {{"i", {100.1, 100.1, 100.1, 100.1}}, {"j", {100, 100, 100, 100}}});
  CHECK(*div_series(flat, "i", "j", 200)[3] == doctest::Approx(0.0));
}

TEST_CASE("fret looks forward on the vwap path") {
  SampledPanel panel = vwap_panel(50, {{"m", {100, 101, 102, 102}}});
  const Series s = fret_series(panel, "m", 50);
  CHECK(*s[0] == doctest::Approx(100.0).epsilon(1e-10));
  CHECK(!s[3].has_value());  // beyond the grid
}

TEST_CASE("feature keys serialize and parse") {
  FeatureKey imb{"ftx_BTC-PERP", FeatureFamily::IMBa, 0, ""};
  CHECK(imb.column_name() == "ftx_BTC-PERP|IMBa");
  FeatureKey tfi{"m1", FeatureFamily::TFI, 500, ""};
  CHECK(tfi.column_name() == "m1|TFI|500");
  FeatureKey div{"m1", FeatureFamily::DIV, 150000, "m2"};
  CHECK(div.column_name() == "m1|DIV|150000|m2");
  for (const auto& k : {imb, tfi, div})
    CHECK(FeatureKey::parse(k.column_name()) == k);
}

TEST_CASE("feature csv round-trips") {
  FeatureMatrix m;
  m.ts = {50, 100, 150};
  m.columns = {"m|TFI|500", "fret|m|500"};
  m.values = {{1.5, std::nullopt, -2.25}, {std::nullopt, 0.125, 4.0}};
  write_feature_csv(m, "test_features.csv");
  const FeatureMatrix back = read_feature_csv("test_features.csv");
  CHECK(back.ts == m.ts);
  CHECK(back.columns == m.columns);
  CHECK(back.values == m.values);
  std::remove("test_features.csv");
}
