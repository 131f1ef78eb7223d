#include <doctest.h>

#include <random>

#include "crossflow/transform.hpp"

using namespace crossflow;

TEST_CASE("apply_step counts crossed thresholds with sign symmetry") {
  std::vector<double> grid;
  for (int t = 1; t <= 10; ++t) grid.push_back(t);
  for (int x = -10; x <= 10; ++x)
    CHECK(apply_step(grid, static_cast<double>(x)) == static_cast<double>(x));

  CHECK(apply_step({}, 3.0) == 0.0);
  CHECK(apply_step({1.0, 5.0}, -3.0) == -1.0);
  CHECK(apply_step({1.0, 5.0}, 0.0) == 0.0);

  // odd and nondecreasing
  const std::vector<double> t = {0.5, 2.0, 7.5};
  double prev = apply_step(t, -10.0);
  for (double x = -10.0; x <= 10.0; x += 0.25) {
    CHECK(apply_step(t, -x) == -apply_step(t, x));
    const double y = apply_step(t, x);
    CHECK(y >= prev);
    prev = y;
  }
}

TEST_CASE("init_partition spans the quantile range evenly") {
  std::vector<double> xs;
  for (int k = 0; k < 100; ++k) xs.push_back(static_cast<double>(k));
  const auto t = init_partition(xs, 0.0, 100);
  REQUIRE(t.size() == 100);
  for (int k = 0; k < 100; ++k)
    CHECK(t[static_cast<std::size_t>(k)] == doctest::Approx(k).epsilon(1e-12));

  const std::vector<double> constant = {5.0, 5.0, 5.0};
  CHECK(init_partition(constant, 0.0001, 100) == std::vector<double>{5.0});

  // symmetric range, n = 3 -> {-50, 0, 50}
  std::vector<double> sym;
  for (int k = -50; k <= 50; ++k) sym.push_back(static_cast<double>(k));
  const auto t3 = init_partition(sym, 0.0, 3);
  REQUIRE(t3.size() == 3);
  CHECK(t3[0] == doctest::Approx(-50.0));
  CHECK(t3[1] == doctest::Approx(0.0).scale(1.0));
  CHECK(t3[2] == doctest::Approx(50.0));
}

TEST_CASE("calibrate keeps a perfectly explaining partition fixed") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> dist(0.0, 2.0);
  std::vector<double> x;
  for (int k = 0; k < 500; ++k) x.push_back(dist(rng));
  const std::vector<double> t0 = {-1.0, 0.5, 1.5};
  std::vector<double> target;
  for (const double v : x) target.push_back(3.0 * apply_step(t0, v));
  const auto result = calibrate_transform(x, {target}, t0);
  CHECK(result.transform.thresholds == t0);
  CHECK(result.transform.r2_bar_final == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("calibrate prunes toward a sign signal with nondecreasing r2") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> x, target;
  for (int k = 0; k < 2000; ++k) {
    const double v = dist(rng);
    x.push_back(v);
    target.push_back(v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0));
  }
  const auto t0 = init_partition(x, 0.0001, 30);
  const auto result = calibrate_transform(x, {target}, t0);
  CHECK(result.transform.thresholds.size() < t0.size());
  for (std::size_t k = 1; k < result.r2_history.size(); ++k)
    CHECK(result.r2_history[k] > result.r2_history[k - 1]);
  CHECK(result.transform.r2_bar_final >= result.r2_bar_raw);
}

TEST_CASE("singleton partition survives when removal hurts") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> x, target;
  for (int k = 0; k < 300; ++k) {
    const double v = dist(rng);
    x.push_back(v);
    target.push_back(apply_step({0.0}, v));
  }
  const auto result =
      calibrate_transform(x, {target}, std::vector<double>{0.0});
  CHECK(result.transform.thresholds == std::vector<double>{0.0});
}

TEST_CASE("calibrate requires at least two samples") {
  CHECK_THROWS(calibrate_transform(std::vector<double>{1.0},
                                   {std::vector<double>{1.0}}, {0.5}));
}

TEST_CASE("step transform json round-trip") {
  StepTransform t;
  t.thresholds = {-2.5, 0.0, 1.25};
  t.source_feature = FeatureKey{"m1", FeatureFamily::TFI, 500, ""};
  t.r2_bar_final = 0.125;
  const StepTransform back = StepTransform::from_json(t.to_json());
  CHECK(back.thresholds == t.thresholds);
  CHECK(back.source_feature == t.source_feature);
  CHECK(back.r2_bar_final == t.r2_bar_final);
}
