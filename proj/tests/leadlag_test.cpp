#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "crossflow/leadlag.hpp"

using namespace crossflow;

namespace {

// Feature matrix for two markets where market b's future returns are a
// noisy function of market a's TFI, and a's returns are pure noise.
FeatureMatrix planted_matrix(std::uint64_t seed, std::size_t n = 3000) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  FeatureMatrix m;
  const std::vector<std::string> markets = {"a", "b"};
  for (std::size_t r = 0; r < n; ++r)
    m.ts.push_back(static_cast<std::int64_t>(r + 1) * 50);

  std::map<std::string, Series> cols;
  Series a_tfi;
  for (std::size_t r = 0; r < n; ++r) a_tfi.push_back(dist(rng));
  for (const auto& id : markets) {
    for (const char* fam : {"IMBa", "IMBb"}) {
      Series s;
      for (std::size_t r = 0; r < n; ++r) s.push_back(std::abs(dist(rng)));
      cols[id + std::string("|") + fam] = s;
    }
    Series pret, div_col;
    for (std::size_t r = 0; r < n; ++r) {
      pret.push_back(dist(rng));
      div_col.push_back(dist(rng));
    }
    cols[id + std::string("|TFI|500")] =
        id == "a" ? a_tfi : [&] {
          Series s;
          for (std::size_t r = 0; r < n; ++r) s.push_back(dist(rng));
          return s;
        }();
    cols[id + std::string("|PRET|500")] = pret;
    const std::string other = id == "a" ? "b" : "a";
    cols[id + std::string("|DIV|150000|") + other] = div_col;
  }
  Series fret_a, fret_b;
  for (std::size_t r = 0; r < n; ++r) {
    fret_a.push_back(dist(rng));
    fret_b.push_back(2.0 * *a_tfi[r] + 0.3 * dist(rng));
  }
  cols["fret|a|500"] = fret_a;
  cols["fret|b|500"] = fret_b;

  for (const auto& [name, s] : cols) {
    m.columns.push_back(name);
    m.values.push_back(s);
  }
  return m;
}

}  // namespace

TEST_CASE("pairwise matrix recovers a planted dependence") {
  const FeatureMatrix m = planted_matrix(1);
  const LeadLagMatrix ll = pairwise_r2_matrix(m, {"a", "b"});
  const auto idx = [&](const std::string& id) {
    return static_cast<std::size_t>(
        std::find(ll.markets.begin(), ll.markets.end(), id) -
        ll.markets.begin());
  };
  // predicting b from a dominates every other direction
  CHECK(ll.r2[idx("b")][idx("a")] > 0.9);
  CHECK(ll.r2[idx("a")][idx("b")] < 0.05);
  CHECK(ll.r2[idx("a")][idx("a")] < 0.05);
  // a is the best predictor: top of the column-average ordering
  const LeadLagOrdering ordering = rank_leaders(ll);
  CHECK(ordering.by_col_avg.front() == "a");
}

TEST_CASE("diagonal fits drop the self-divergence covariate") {
  const FeatureMatrix m = planted_matrix(2);
  const LeadLagMatrix ll = pairwise_r2_matrix(m, {"a", "b"});
  // fits are row-major
  const PairFit& diag = ll.fits[0];
  CHECK(diag.target_market == diag.source_market);
  REQUIRE(!diag.dropped_columns.empty());
  bool div_dropped = false;
  for (const auto& c : diag.dropped_columns)
    if (c.find("DIV") != std::string::npos) div_dropped = true;
  CHECK(div_dropped);
  CHECK(diag.fit.model.feature_names.size() == 4);
}

TEST_CASE("averages are consistent with the matrix") {
  const FeatureMatrix m = planted_matrix(3);
  const LeadLagMatrix ll = pairwise_r2_matrix(m, {"a", "b"});
  for (std::size_t i = 0; i < ll.markets.size(); ++i) {
    double rs = 0.0, cs = 0.0;
    for (std::size_t j = 0; j < ll.markets.size(); ++j) {
      rs += ll.r2[i][j];
      cs += ll.r2[j][i];
    }
    CHECK(ll.row_avg[i] == doctest::Approx(rs / 2.0).epsilon(1e-12));
    CHECK(ll.col_avg[i] == doctest::Approx(cs / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("zero matrix ranks by market id") {
  LeadLagMatrix ll;
  ll.markets = {"zeta", "alpha", "mid"};
  ll.r2 = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  ll.row_avg = {0, 0, 0};
  ll.col_avg = {0, 0, 0};
  const LeadLagOrdering ordering = rank_leaders(ll);
  CHECK(ordering.by_row_avg ==
        std::vector<std::string>({"alpha", "mid", "zeta"}));
  CHECK(ordering.by_col_sum == ordering.by_row_avg);
}

TEST_CASE("rank-deficient pair is flagged with zero r2") {
  FeatureMatrix m = planted_matrix(4);
  // flatten every covariate of the b<-a pair, including the divergence
  // column (named for the target market), so nothing is left to fit
  for (std::size_t c = 0; c < m.columns.size(); ++c) {
    const auto& name = m.columns[c];
    if (name.rfind("a|", 0) == 0 || name.rfind("b|DIV", 0) == 0)
      for (auto& v : m.values[c]) v = 1.0;
  }
  const LeadLagMatrix ll = pairwise_r2_matrix(m, {"a", "b"});
  const auto idx = [&](const std::string& id) {
    return static_cast<std::size_t>(
        std::find(ll.markets.begin(), ll.markets.end(), id) -
        ll.markets.begin());
  };
  CHECK(ll.r2[idx("b")][idx("a")] == 0.0);
  const PairFit& fit = ll.fits[idx("b") * 2 + idx("a")];
  CHECK(fit.dropped_columns.size() >= 4);
}
