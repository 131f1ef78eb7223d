#include <doctest.h>

#include "crossflow/maker.hpp"

using namespace crossflow;

namespace {

SimEvent limit(std::int64_t seq, std::int64_t ts, Side side, double price,
               double size, std::int64_t id) {
  SimEvent e;
  e.seq = seq;
  e.ts_ms = ts;
  e.kind = EventKind::SubmitLimit;
  e.side = side;
  e.price = price;
  e.size_usd = size;
  e.order_id = id;
  return e;
}

SimEvent market(std::int64_t seq, std::int64_t ts, Side side, double size) {
  SimEvent e;
  e.seq = seq;
  e.ts_ms = ts;
  e.kind = EventKind::SubmitMarket;
  e.side = side;
  e.size_usd = size;
  return e;
}

MakerParams params_for_test() {
  MakerParams p;
  p.cancel_threshold = 2.0;
  p.flow_gate = 0.0;
  p.amount_usd = 500.0;
  p.tick = 0.5;
  p.initial_position = 1;
  return p;
}

std::vector<SimEvent> base_market() {
  return {limit(1, 0, Side::Buy, 99.0, 50000.0, 1),
          limit(2, 0, Side::Sell, 101.0, 50000.0, 2)};
}

}  // namespace

TEST_CASE("race pair: sweep before the cancel signal fills, after it does not") {
  // favorable signal until an adverse sweep at ts=200
  auto events = base_market();
  events.push_back(market(3, 200, Side::Buy, 600.0));

  // scenario A: prediction stays below T -> resting sell order is swept
  {
    const std::vector<MakerSignal> signals = {{0, 0.0, -1.0}};
    const MakerResult r =
        run_maker_strategy(events, signals, params_for_test());
    REQUIRE(r.fills.size() == 1);
    CHECK(r.fills[0].side == Side::Sell);
    CHECK(r.fills[0].price == 99.5);  // best_bid + tick
    CHECK(r.fills[0].size_usd == 500.0);
    CHECK(r.position_path == std::vector<int>({0}));
  }

  // scenario B: prediction crosses T one signal earlier -> cancel wins
  {
    const std::vector<MakerSignal> signals = {{0, 0.0, -1.0}, {150, 3.0, -1.0}};
    const MakerResult r =
        run_maker_strategy(events, signals, params_for_test());
    CHECK(r.fills.empty());
    CHECK(r.n_cancels >= 1);
  }
}

TEST_CASE("gate permanently closed means no posts at all") {
  const std::vector<MakerSignal> signals = {{0, 10.0, -1.0}};
  const MakerResult r =
      run_maker_strategy(base_market(), signals, params_for_test());
  CHECK(r.n_posts == 0);
  CHECK(r.fills.empty());
}

TEST_CASE("benchmark configuration never cancels and alternates sides") {
  auto events = base_market();
  // alternating sweeps large enough to consume the strategy order
  for (int k = 0; k < 6; ++k)
    events.push_back(market(3 + k, 200 * (k + 1),
                            k % 2 ? Side::Sell : Side::Buy, 200.0));
  const std::vector<MakerSignal> signals = {{0, 0.0, 0.0}};
  const MakerResult r = run_maker_strategy(
      events, signals, MakerParams::benchmark(100.0, 0.5));
  CHECK(r.n_cancels == 0);
  REQUIRE(r.fills.size() >= 2);
  for (std::size_t k = 1; k < r.fills.size(); ++k)
    CHECK(r.fills[k].side != r.fills[k - 1].side);
  CHECK(r.fills[0].side == Side::Sell);  // starts long
}

TEST_CASE("partial fills of one order aggregate to a single fill") {
  auto events = base_market();
  // two takers in one event stream each taking half the posted amount
  events.push_back(market(3, 200, Side::Buy, 250.0));
  const std::vector<MakerSignal> signals = {{0, 0.0, -1.0}};
  const MakerResult r =
      run_maker_strategy(events, signals, params_for_test());
  REQUIRE(r.fills.size() == 1);
  CHECK(r.fills[0].size_usd == 250.0);
  // the unfilled remainder was cancelled: position flipped, no second fill
  CHECK(r.position_path == std::vector<int>({0}));
}

TEST_CASE("calibrate_cancel_threshold finds the planted collapse") {
  std::vector<std::int64_t> ts;
  std::vector<double> price, size, pred;
  for (int k = 0; k < 20; ++k) {
    ts.push_back(100 * (k + 1));
    price.push_back(100.0);
    size.push_back(600.0);
    pred.push_back(0.0);
  }
  size[8] = 900.0;   // liquidity spike above the second quartile
  size[9] = 100.0;   // collapse below the first quartile within 500 ms
  pred[8] = 1.83;
  const CancelCalibration c = calibrate_cancel_threshold(ts, price, size, pred);
  CHECK(c.n_qualifying == 1);
  CHECK(c.qualifying_indices == std::vector<std::size_t>{8});
  CHECK(c.threshold == 1.83);
  CHECK(c.quantiles.at(30) == 1.83);
  CHECK(c.quantiles.at(70) == 1.83);
  CHECK(c.m <= 600.0);
  CHECK(c.M >= c.m);
}

TEST_CASE("calibration throws when no sample qualifies") {
  std::vector<std::int64_t> ts = {100, 200, 300};
  std::vector<double> price = {100, 100, 100};
  std::vector<double> size = {600, 600, 600};
  std::vector<double> pred = {0, 0, 0};
  CHECK_THROWS(calibrate_cancel_threshold(ts, price, size, pred));
}

TEST_CASE("collapse at a shifted price does not qualify") {
  std::vector<std::int64_t> ts;
  std::vector<double> price, size, pred;
  for (int k = 0; k < 20; ++k) {
    ts.push_back(100 * (k + 1));
    price.push_back(100.0);
    size.push_back(600.0);
    pred.push_back(0.0);
  }
  size[8] = 900.0;
  size[9] = 100.0;
  price[9] = 100.5;  // collapse happens at a different price level
  CHECK_THROWS(calibrate_cancel_threshold(ts, price, size, pred));
}

TEST_CASE("adverse selection sign convention and statistics") {
  const std::vector<std::int64_t> price_ts = {100, 200, 600, 700};
  const std::vector<double> price = {100.0, 100.0, 100.1, 100.3};
  const std::vector<MakerFill> fills = {{100, Side::Sell, 100.0, 1000.0},
                                        {200, Side::Sell, 100.0, 1000.0}};
  const AdverseSelectionReport report =
      adverse_selection(fills, price_ts, price, {500});
  REQUIRE(report.stats.size() == 1);
  const AdverseStats& s = report.stats[0];
  CHECK(s.n == 2);
  CHECK(s.avg == doctest::Approx(-20.0).epsilon(1e-9));
  CHECK(s.min == doctest::Approx(-30.0).epsilon(1e-9));
  CHECK(s.max == doctest::Approx(-10.0).epsilon(1e-9));
  CHECK(s.median == doctest::Approx(-20.0).epsilon(1e-9));
}

TEST_CASE("adverse selection excludes horizons past the data end") {
  const std::vector<std::int64_t> price_ts = {100, 400};
  const std::vector<double> price = {100.0, 100.0};
  const std::vector<MakerFill> fills = {{100, Side::Buy, 100.0, 1000.0},
                                        {350, Side::Buy, 100.0, 1000.0}};
  const AdverseSelectionReport report =
      adverse_selection(fills, price_ts, price, {300});
  CHECK(report.stats[0].n == 1);  // second fill's horizon extends past the end
  CHECK(report.stats[0].avg == 0.0);
}

TEST_CASE("pnl path accrues rebates per leg") {
  const std::vector<MakerFill> fills = {{100, Side::Buy, 100.0, 10000.0},
                                        {200, Side::Sell, 100.0, 10000.0}};
  const std::vector<std::int64_t> price_ts = {100, 200, 300};
  const std::vector<double> price = {100.0, 100.0, 100.0};
  const auto path = pnl_timeseries(fills, price_ts, price, 2.5);
  REQUIRE(path.size() == 3);
  CHECK(path[2].realized_usd == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(path[2].total_usd == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("pnl path marks open inventory at the last price") {
  const std::vector<MakerFill> fills = {{100, Side::Buy, 100.0, 2000.0}};
  const std::vector<std::int64_t> price_ts = {100, 200};
  const std::vector<double> price = {100.0, 101.0};
  const auto path = pnl_timeseries(fills, price_ts, price, 0.0);
  CHECK(path[0].total_usd == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(path[1].realized_usd == doctest::Approx(-2000.0));
  CHECK(path[1].total_usd == doctest::Approx(20.0).epsilon(1e-9));
}
