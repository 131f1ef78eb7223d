#include "crossflow/backtest.hpp"

#include <fstream>
#include <stdexcept>

#include "crossflow/csv.hpp"
#include "crossflow/stats.hpp"

namespace crossflow {

double threshold_from_insample(std::span<const double> predictions) {
  if (predictions.empty())
    throw std::invalid_argument("threshold needs predictions");
  return stats::quantile(predictions, 0.95);
}

FillSequence run_taker_walkforward(const std::vector<std::int64_t>& ts,
                                   const Series& predictions,
                                   const AlignedBookSeries& books, double T) {
  if (ts.size() != predictions.size() || ts.size() != books.book_idx.size())
    throw std::invalid_argument("walk-forward inputs misaligned");
  FillSequence seq;
  int position = 0;
  for (std::size_t g = 0; g < ts.size(); ++g) {
    if (!predictions[g]) continue;
    const double pred = *predictions[g];
    const bool want_buy = position <= 0 && pred > T;
    const bool want_sell = position >= 0 && pred < -T;
    if (!want_buy && !want_sell) continue;
    const BookSnapshot* book = books.at(g);
    if (!book || book->bids.empty() || book->asks.empty()) {
      ++seq.skipped_signals;
      continue;
    }
    if (want_buy) {
      seq.fills.push_back({ts[g], Side::Buy, book->best_ask()});
      position = 1;
    } else {
      seq.fills.push_back({ts[g], Side::Sell, book->best_bid()});
      position = -1;
    }
    seq.position_path.push_back(position);
  }
  return seq;
}

PnLReport compute_pnl(const FillSequence& seq, double fee_default_bpts,
                      double fee_vip_bpts, double threshold) {
  PnLReport report;
  report.threshold = threshold;
  report.n_trades = seq.fills.size();
  for (std::size_t k = 0; k + 1 < seq.fills.size(); ++k) {
    const double p0 = seq.fills[k].price;
    const double p1 = seq.fills[k + 1].price;
    report.pnl1 += seq.fills[k].side == Side::Buy ? (p1 / p0 - 1.0) * 1e4
                                                  : (p0 / p1 - 1.0) * 1e4;
  }
  const double n = static_cast<double>(report.n_trades);
  report.pnl2 = report.pnl1 - n * fee_default_bpts;
  report.pnl3 = report.pnl1 - n * fee_vip_bpts;
  return report;
}

Series predict_series(const LinearModel& model, const FeatureMatrix& features) {
  std::vector<const Series*> cols;
  for (const auto& name : model.feature_names)
    cols.push_back(&features.column(name));
  Series out(features.ts.size(), std::nullopt);
  std::vector<double> row(cols.size());
  for (std::size_t r = 0; r < features.ts.size(); ++r) {
    bool complete = true;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (!(*cols[c])[r]) {
        complete = false;
        break;
      }
      row[c] = *(*cols[c])[r];
    }
    if (complete) out[r] = model.predict(row);
  }
  return out;
}

PnLMatrix pnl_matrix(const LeadLagMatrix& models,
                     const FeatureMatrix& insample, const FeatureMatrix& oos,
                     const SampledPanel& oos_panel,
                     const std::map<std::string, MarketSpec>& specs) {
  PnLMatrix out;
  out.markets = models.markets;
  const std::size_t m = models.markets.size();
  out.cells.assign(m, std::vector<PnLReport>(m));

  for (std::size_t i = 0; i < m; ++i) {
    const auto& target_market = models.markets[i];
    const auto spec_it = specs.find(target_market);
    if (spec_it == specs.end())
      throw std::runtime_error("no market spec for " + target_market);
    const MarketSpec& spec = spec_it->second;
    const auto& books = oos_panel.markets.at(target_market).books;

    for (std::size_t j = 0; j < m; ++j) {
      const PairFit& pair = models.fits[i * m + j];
      if (pair.fit.model.feature_names.empty()) continue;  // pair not fit

      const Series ins_pred = predict_series(pair.fit.model, insample);
      std::vector<double> ins_dense;
      for (const auto& v : ins_pred)
        if (v) ins_dense.push_back(*v);
      if (ins_dense.empty()) continue;
      const double T = threshold_from_insample(ins_dense);

      const Series oos_pred = predict_series(pair.fit.model, oos);
      const FillSequence seq =
          run_taker_walkforward(oos.ts, oos_pred, books, T);
      out.cells[i][j] = compute_pnl(seq, spec.taker_fee_default_bpts,
                                    spec.taker_fee_vip_bpts, T);
    }
  }

  out.row_avg_pnl1.resize(m);
  out.col_avg_pnl1.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    double rs = 0.0, cs = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      rs += out.cells[i][j].pnl1;
      cs += out.cells[j][i].pnl1;
    }
    out.row_avg_pnl1[i] = rs / static_cast<double>(m);
    out.col_avg_pnl1[i] = cs / static_cast<double>(m);
  }
  return out;
}

namespace {

void write_matrix(const PnLMatrix& matrix, const std::string& path,
                  double PnLReport::* field) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "market";
  for (const auto& id : matrix.markets) out << ',' << id;
  out << '\n';
  for (std::size_t i = 0; i < matrix.markets.size(); ++i) {
    out << matrix.markets[i];
    for (std::size_t j = 0; j < matrix.markets.size(); ++j)
      out << ',' << csv::format_double(matrix.cells[i][j].*field);
    out << '\n';
  }
}

}  // namespace

void write_pnl_csv(const PnLMatrix& matrix, const std::string& prefix) {
  write_matrix(matrix, prefix + "pnl1.csv", &PnLReport::pnl1);
  write_matrix(matrix, prefix + "pnl2.csv", &PnLReport::pnl2);
  write_matrix(matrix, prefix + "pnl3.csv", &PnLReport::pnl3);
}

void write_trades_csv(const FillSequence& seq, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "ts_ms,side,price,position\n";
  for (std::size_t k = 0; k < seq.fills.size(); ++k) {
    const Fill& f = seq.fills[k];
    out << f.ts_ms << ',' << to_string(f.side) << ','
        << csv::format_double(f.price) << ',' << seq.position_path[k] << '\n';
  }
}

}  // namespace crossflow
