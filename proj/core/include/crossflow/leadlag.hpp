#pragma once

#include <string>
#include <vector>

#include "crossflow/models.hpp"

namespace crossflow {

struct LeadLagConfig {
  std::int64_t tfi_horizon_ms = 500;
  std::int64_t pret_horizon_ms = 500;
  std::int64_t div_horizon_ms = 150000;
  std::int64_t fret_delta_ms = 500;
};

/// One pairwise fit: target market i's future returns on the 5 covariates
/// of source market j (IMBa, IMBb, TFI, PRET, DIV^{ij}).
struct PairFit {
  std::string target_market;
  std::string source_market;
  FitResult fit;
  std::vector<std::string> dropped_columns;  // degenerate covariates
};

struct LeadLagMatrix {
  std::vector<std::string> markets;
  std::vector<std::vector<double>> r2;  // r2[i][j]: predict i from j
  std::vector<double> row_avg;          // leadingness of... predictability of i
  std::vector<double> col_avg;          // predictive power of j
  std::vector<PairFit> fits;            // row-major, M*M
};

LeadLagMatrix pairwise_r2_matrix(const FeatureMatrix& features,
                                 const std::vector<std::string>& markets,
                                 const LeadLagConfig& config = {});

struct LeadLagOrdering {
  std::vector<std::string> by_row_avg;  // descending; ties by market id
  std::vector<std::string> by_col_avg;
  std::vector<std::string> by_row_sum;
  std::vector<std::string> by_col_sum;
};

LeadLagOrdering rank_leaders(const LeadLagMatrix& matrix);

/// Emits <prefix>leadlag_r2.csv, <prefix>leadlag_rowavg.csv,
/// <prefix>leadlag_colavg.csv.
void write_leadlag_csv(const LeadLagMatrix& matrix, const std::string& prefix);

}  // namespace crossflow
