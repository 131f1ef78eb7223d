#include "crossflow/leadlag.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "crossflow/csv.hpp"
#include "crossflow/stats.hpp"

namespace crossflow {

LeadLagMatrix pairwise_r2_matrix(const FeatureMatrix& features,
                                 const std::vector<std::string>& markets,
                                 const LeadLagConfig& config) {
  LeadLagMatrix out;
  out.markets = markets;
  const std::size_t m = markets.size();
  out.r2.assign(m, std::vector<double>(m, 0.0));

  for (std::size_t i = 0; i < m; ++i) {
    const std::string target =
        "fret|" + markets[i] + "|" + std::to_string(config.fret_delta_ms);
    for (std::size_t j = 0; j < m; ++j) {
      PairFit pair;
      pair.target_market = markets[i];
      pair.source_market = markets[j];

      std::vector<std::string> cols = {
          FeatureKey{markets[j], FeatureFamily::IMBa, 0, ""}.column_name(),
          FeatureKey{markets[j], FeatureFamily::IMBb, 0, ""}.column_name(),
          FeatureKey{markets[j], FeatureFamily::TFI, config.tfi_horizon_ms, ""}
              .column_name(),
          FeatureKey{markets[j], FeatureFamily::PRET, config.pret_horizon_ms,
                     ""}
              .column_name(),
      };
      if (i != j) {
        cols.push_back(FeatureKey{markets[i], FeatureFamily::DIV,
                                  config.div_horizon_ms, markets[j]}
                           .column_name());
      } else {
        // DIV^{ii} is identically zero and carries no column
        pair.dropped_columns.push_back(
            FeatureKey{markets[i], FeatureFamily::DIV, config.div_horizon_ms,
                       markets[i]}
                .column_name());
      }
      // drop columns the matrix lacks
      std::erase_if(cols, [&](const std::string& c) {
        if (features.column_index(c) >= 0) return false;
        pair.dropped_columns.push_back(c);
        return true;
      });

      DenseData data = dense_rows(features, cols, target);
      // drop degenerate (zero-variance) covariates for this pair
      for (std::size_t c = data.X.size(); c-- > 0;) {
        if (stats::stddev(data.X[c]) > 0.0) continue;
        pair.dropped_columns.push_back(data.feature_names[c]);
        data.X.erase(data.X.begin() + static_cast<std::ptrdiff_t>(c));
        data.feature_names.erase(data.feature_names.begin() +
                                 static_cast<std::ptrdiff_t>(c));
      }

      double r2 = 0.0;
      if (!data.X.empty() && data.n_rows() > data.n_features() + 1) {
        try {
          pair.fit = fit_ols(data, target, config.fret_delta_ms);
          r2 = pair.fit.diagnostics.r2_in_sample;
        } catch (const std::runtime_error&) {
          // collinear pair: report zero explanatory power, keep going
          pair.dropped_columns.push_back("<rank-deficient>");
        }
      }
      out.r2[i][j] = r2;
      out.fits.push_back(std::move(pair));
    }
  }

  out.row_avg.resize(m);
  out.col_avg.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    double rs = 0.0, cs = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      rs += out.r2[i][j];
      cs += out.r2[j][i];
    }
    out.row_avg[i] = rs / static_cast<double>(m);
    out.col_avg[i] = cs / static_cast<double>(m);
  }
  return out;
}

namespace {

std::vector<std::string> order_by(const std::vector<std::string>& markets,
                                  const std::vector<double>& score) {
  std::vector<std::size_t> idx(markets.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return markets[a] < markets[b];
  });
  std::vector<std::string> out;
  out.reserve(idx.size());
  for (const std::size_t i : idx) out.push_back(markets[i]);
  return out;
}

}  // namespace

LeadLagOrdering rank_leaders(const LeadLagMatrix& matrix) {
  LeadLagOrdering out;
  out.by_row_avg = order_by(matrix.markets, matrix.row_avg);
  out.by_col_avg = order_by(matrix.markets, matrix.col_avg);
  // sums order identically to averages for a fixed M; emitted separately
  // for heatmap tooling that expects sum-based orderings
  std::vector<double> row_sum(matrix.markets.size()), col_sum(matrix.markets.size());
  for (std::size_t i = 0; i < matrix.markets.size(); ++i) {
    row_sum[i] = matrix.row_avg[i] * static_cast<double>(matrix.markets.size());
    col_sum[i] = matrix.col_avg[i] * static_cast<double>(matrix.markets.size());
  }
  out.by_row_sum = order_by(matrix.markets, row_sum);
  out.by_col_sum = order_by(matrix.markets, col_sum);
  return out;
}

void write_leadlag_csv(const LeadLagMatrix& matrix, const std::string& prefix) {
  const std::size_t m = matrix.markets.size();
  {
    // market-name row labels don't fit the numeric csv::Table; write directly
    std::ofstream out(prefix + "leadlag_r2.csv");
    if (!out) throw std::runtime_error("cannot write leadlag_r2.csv");
    out << "market";
    for (const auto& id : matrix.markets) out << ',' << id;
    out << '\n';
    for (std::size_t i = 0; i < m; ++i) {
      out << matrix.markets[i];
      for (std::size_t j = 0; j < m; ++j)
        out << ',' << csv::format_double(matrix.r2[i][j]);
      out << '\n';
    }
  }
  auto write_avg = [&](const std::string& name,
                       const std::vector<double>& avg) {
    std::ofstream out(prefix + name);
    if (!out) throw std::runtime_error("cannot write " + name);
    out << "market,avg_r2\n";
    for (std::size_t i = 0; i < m; ++i)
      out << matrix.markets[i] << ',' << csv::format_double(avg[i]) << '\n';
  };
  write_avg("leadlag_rowavg.csv", matrix.row_avg);
  write_avg("leadlag_colavg.csv", matrix.col_avg);
}

}  // namespace crossflow
