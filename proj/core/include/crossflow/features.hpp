#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crossflow/marketdata.hpp"

namespace crossflow {

enum class FeatureFamily { IMBa, IMBb, TFI, PRET, DIV };
enum class BookSide { Ask, Bid };

std::string to_string(FeatureFamily f);
FeatureFamily feature_family_from_string(const std::string& s);

/// Identifies one feature column. Serialized as
/// "<market>|<family>" (imbalances), "<market>|<family>|<horizon_ms>"
/// (TFI/PRET) or "<market>|DIV|<horizon_ms>|<counterparty>".
struct FeatureKey {
  std::string market_id;
  FeatureFamily family = FeatureFamily::TFI;
  std::int64_t horizon_ms = 0;     // 0 = not applicable (IMBa/IMBb)
  std::string counterparty_market; // DIV only

  std::string column_name() const;
  static FeatureKey parse(const std::string& column_name);
  bool operator==(const FeatureKey&) const = default;
  bool operator<(const FeatureKey& o) const;
};

struct DepthParameter {
  std::string market_id;
  double n_usd = 1.0;  // >= 1
};

/// (b - a) / (b + a) with b, a the top-of-book USD sizes.
double classical_imbalance(const BookSnapshot& book);

/// Volume-weighted average price of walking one side of the book until
/// `size_usd` is consumed; nullopt when cumulative depth is insufficient
/// (such samples are flagged and excluded downstream, never extrapolated).
std::optional<double> avg_exec_price(const BookSnapshot& book, BookSide side,
                                     double size_usd);

/// Median over time of the USD liquidity within 5 bpts of the touch,
/// computed per side then averaged across the two sides; floored at 1.
DepthParameter select_depth_N(const std::string& market_id,
                              const AlignedBookSeries& books);

/// Ask: (p_a(N)/p_a(1) - 1) * 1e4.  Bid: (p_b(1)/p_b(N) - 1) * 1e4.
/// Both nonnegative; nullopt on insufficient depth.
std::optional<double> imbalance(const BookSnapshot& book, double n_usd,
                                BookSide side);

using Series = std::vector<std::optional<double>>;

Series imbalance_series(const SampledPanel& panel, const std::string& market,
                        double n_usd, BookSide side);
Series classical_imbalance_series(const SampledPanel& panel,
                                  const std::string& market);

/// Signed trade flow over (t - delta, t]: buy USD volume minus sell USD
/// volume. Absent while the window extends past the start of the grid.
Series tfi_series(const SampledPanel& panel, const std::string& market,
                  std::int64_t delta_ms);

/// (p_t / p_{t-delta} - 1) * 1e4 on the bucket vwap price.
Series pret_series(const SampledPanel& panel, const std::string& market,
                   std::int64_t delta_ms);

/// d(p^i, p^j) - rolling mean of d over the past Delta, d(p,q)=(p/q-1)*1e4.
Series div_series(const SampledPanel& panel, const std::string& market_i,
                  const std::string& market_j, std::int64_t lookback_ms);

/// Future return target: (p_{t+delta} / p_t - 1) * 1e4 on the vwap price.
Series fret_series(const SampledPanel& panel, const std::string& market,
                   std::int64_t delta_ms);

struct FeatureConfig {
  std::vector<std::int64_t> tfi_horizons_ms = {100, 250, 500, 1000, 2000};
  std::vector<std::int64_t> pret_horizons_ms = {100, 250, 500, 1000, 2000};
  std::vector<std::int64_t> div_horizons_ms = {5000,  9000,   19000,  38000,
                                               75000, 150000, 300000, 600000};
  std::vector<std::int64_t> fret_horizons_ms = {100, 250, 500, 1000, 2000};
};

/// Row-aligned matrix of feature and target columns over the panel grid.
struct FeatureMatrix {
  std::vector<std::int64_t> ts;
  std::vector<std::string> columns;  // feature columns then fret targets
  std::vector<Series> values;        // column-major, values[c].size() == ts.size()

  int column_index(const std::string& name) const;
  const Series& column(const std::string& name) const;
};

/// Computes every feature family for every market at every configured
/// horizon, DIV for all ordered market pairs, plus fret targets
/// ("fret|<market>|<delta_ms>"). Depth parameters N_i are selected from
/// the panel itself unless provided.
FeatureMatrix build_feature_matrix(
    const SampledPanel& panel, const FeatureConfig& config = {},
    const std::map<std::string, double>* depth_override = nullptr);

void write_feature_csv(const FeatureMatrix& m, const std::string& path);
FeatureMatrix read_feature_csv(const std::string& path);

}  // namespace crossflow
