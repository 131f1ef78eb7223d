#include <doctest.h>

#include <random>

#include "crossflow/backtest.hpp"
#include "test_util.hpp"

using namespace crossflow;
using testutil::simple_book;

namespace {

AlignedBookSeries fixed_books(int n, double bid, double ask) {
  AlignedBookSeries s;
  s.snapshots.push_back(simple_book(0, bid, ask, 1000, 1000));
  s.book_idx.assign(static_cast<std::size_t>(n), 0);
  return s;
}

std::vector<std::int64_t> grid_ts(int n) {
  std::vector<std::int64_t> ts;
  for (int k = 1; k <= n; ++k) ts.push_back(50 * k);
  return ts;
}

}  // namespace

TEST_CASE("in-sample threshold is the interpolated 95th percentile") {
  std::vector<double> preds;
  for (int k = 1; k <= 100; ++k) preds.push_back(static_cast<double>(k));
  CHECK(threshold_from_insample(preds) == doctest::Approx(95.05));
  CHECK(threshold_from_insample(std::vector<double>{3.5, 3.5, 3.5}) == 3.5);
  CHECK(threshold_from_insample(std::vector<double>{7.0}) == 7.0);
}

TEST_CASE("walk-forward hand trace buys the ask and sells the bid") {
  const Series preds = {5.0, 0.0, -5.0, 0.0, 5.0};
  const FillSequence seq =
      run_taker_walkforward(grid_ts(5), preds, fixed_books(5, 99, 100), 2.0);
  REQUIRE(seq.fills.size() == 3);
  CHECK(seq.fills[0].side == Side::Buy);
  CHECK(seq.fills[0].price == 100.0);
  CHECK(seq.fills[1].side == Side::Sell);
  CHECK(seq.fills[1].price == 99.0);
  CHECK(seq.fills[2].side == Side::Buy);
  CHECK(seq.fills[2].price == 100.0);
  CHECK(seq.position_path == std::vector<int>({1, -1, 1}));
}

TEST_CASE("sustained signal produces exactly one trade") {
  const Series preds = {5.0, 5.0, 5.0, 5.0};
  const FillSequence seq =
      run_taker_walkforward(grid_ts(4), preds, fixed_books(4, 99, 100), 2.0);
  CHECK(seq.fills.size() == 1);
}

TEST_CASE("quiet predictions produce no trades") {
  const Series preds = {1.0, -1.0, 0.5, std::nullopt};
  const FillSequence seq =
      run_taker_walkforward(grid_ts(4), preds, fixed_books(4, 99, 100), 2.0);
  CHECK(seq.fills.empty());
}

TEST_CASE("absent book skips the signal and logs it") {
  AlignedBookSeries books = fixed_books(3, 99, 100);
  books.book_idx[1] = -1;
  const Series preds = {0.0, 5.0, 5.0};
  const FillSequence seq =
      run_taker_walkforward(grid_ts(3), preds, books, 2.0);
  CHECK(seq.skipped_signals == 1);
  REQUIRE(seq.fills.size() == 1);
  CHECK(seq.fills[0].ts_ms == 150);
}

TEST_CASE("pnl worked example with the fee tiers") {
  FillSequence seq;
  seq.fills = {{50, Side::Buy, 100.0}, {100, Side::Sell, 101.0}};
  const PnLReport report = compute_pnl(seq, 4.0, 1.5);
  CHECK(report.pnl1 == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(report.pnl2 == doctest::Approx(92.0).epsilon(1e-12));
  CHECK(report.pnl3 == doctest::Approx(97.0).epsilon(1e-12));
  CHECK(report.n_trades == 2);
}

TEST_CASE("flat round trip loses exactly the fees") {
  FillSequence seq;
  seq.fills = {{50, Side::Buy, 100.0}, {100, Side::Sell, 100.0}};
  const PnLReport report = compute_pnl(seq, 4.0, 1.5);
  CHECK(report.pnl1 == 0.0);
  CHECK(report.pnl2 == -8.0);
  CHECK(report.pnl3 == -3.0);
}

TEST_CASE("empty sequence has zero pnl") {
  const PnLReport report = compute_pnl(FillSequence{}, 4.0, 1.5);
  CHECK(report.pnl1 == 0.0);
  CHECK(report.pnl2 == 0.0);
  CHECK(report.pnl3 == 0.0);
}

TEST_CASE("trailing fill contributes no round trip but is charged fees") {
  FillSequence seq;
  seq.fills = {{50, Side::Buy, 100.0}, {100, Side::Sell, 102.0},
               {150, Side::Buy, 101.0}};
  const PnLReport report = compute_pnl(seq, 2.0, 1.0);
  // overlapping pairs: (buy, sell) and (sell, buy)
  const double expected =
      (102.0 / 100.0 - 1) * 1e4 + (102.0 / 101.0 - 1) * 1e4;
  CHECK(report.pnl1 == doctest::Approx(expected).epsilon(1e-12));
  CHECK(report.pnl2 == doctest::Approx(expected - 3 * 2.0).epsilon(1e-12));
  CHECK(report.pnl3 == doctest::Approx(expected - 3 * 1.0).epsilon(1e-12));
}

TEST_CASE("fee identities hold exactly on random sequences") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> price(90.0, 110.0);
  std::uniform_int_distribution<int> len(0, 20);
  for (int trial = 0; trial < 50; ++trial) {
    FillSequence seq;
    Side side = trial % 2 ? Side::Buy : Side::Sell;
    const int n = len(rng);
    for (int k = 0; k < n; ++k) {
      seq.fills.push_back({50 * (k + 1), side, price(rng)});
      side = side == Side::Buy ? Side::Sell : Side::Buy;
    }
    const PnLReport r = compute_pnl(seq, 7.0, 1.5);
    CHECK(r.pnl2 == r.pnl1 - static_cast<double>(r.n_trades) * 7.0);
    CHECK(r.pnl3 == r.pnl1 - static_cast<double>(r.n_trades) * 1.5);
    CHECK(r.n_trades == seq.fills.size());
  }
}
