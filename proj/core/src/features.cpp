#include "crossflow/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "crossflow/csv.hpp"
#include "crossflow/stats.hpp"

namespace crossflow {

std::string to_string(FeatureFamily f) {
  switch (f) {
    case FeatureFamily::IMBa: return "IMBa";
    case FeatureFamily::IMBb: return "IMBb";
    case FeatureFamily::TFI: return "TFI";
    case FeatureFamily::PRET: return "PRET";
    case FeatureFamily::DIV: return "DIV";
  }
  throw std::logic_error("bad FeatureFamily");
}

FeatureFamily feature_family_from_string(const std::string& s) {
  if (s == "IMBa") return FeatureFamily::IMBa;
  if (s == "IMBb") return FeatureFamily::IMBb;
  if (s == "TFI") return FeatureFamily::TFI;
  if (s == "PRET") return FeatureFamily::PRET;
  if (s == "DIV") return FeatureFamily::DIV;
  throw std::invalid_argument("unknown feature family: " + s);
}

std::string FeatureKey::column_name() const {
  std::string name = market_id + "|" + to_string(family);
  if (family == FeatureFamily::IMBa || family == FeatureFamily::IMBb)
    return name;
  name += "|" + std::to_string(horizon_ms);
  if (family == FeatureFamily::DIV) name += "|" + counterparty_market;
  return name;
}

FeatureKey FeatureKey::parse(const std::string& column_name) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t bar = column_name.find('|', start);
    parts.push_back(column_name.substr(
        start, bar == std::string::npos ? std::string::npos : bar - start));
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  if (parts.size() < 2) throw std::invalid_argument("bad feature column: " + column_name);
  FeatureKey key;
  key.market_id = parts[0];
  key.family = feature_family_from_string(parts[1]);
  const bool needs_horizon = key.family != FeatureFamily::IMBa &&
                             key.family != FeatureFamily::IMBb;
  if (needs_horizon) {
    if (parts.size() < 3) throw std::invalid_argument("missing horizon: " + column_name);
    key.horizon_ms = std::stoll(parts[2]);
  }
  if (key.family == FeatureFamily::DIV) {
    if (parts.size() < 4) throw std::invalid_argument("missing counterparty: " + column_name);
    key.counterparty_market = parts[3];
  }
  return key;
}

bool FeatureKey::operator<(const FeatureKey& o) const {
  return std::tie(market_id, family, horizon_ms, counterparty_market) <
         std::tie(o.market_id, o.family, o.horizon_ms, o.counterparty_market);
}

double classical_imbalance(const BookSnapshot& book) {
  if (book.bids.empty() || book.asks.empty())
    throw std::invalid_argument("classical_imbalance on empty book side");
  const double b = book.bids.front().size_usd;
  const double a = book.asks.front().size_usd;
  return (b - a) / (b + a);
}

std::optional<double> avg_exec_price(const BookSnapshot& book, BookSide side,
                                     double size_usd) {
  if (size_usd < 1.0)
    throw std::invalid_argument("avg_exec_price requires size >= 1 USD");
  const auto& levels = side == BookSide::Ask ? book.asks : book.bids;
  double remaining = size_usd;
  double weighted = 0.0;
  for (const auto& lvl : levels) {
    const double take = std::min(remaining, lvl.size_usd);
    weighted += take * lvl.price;
    remaining -= take;
    if (remaining <= 0.0) return weighted / size_usd;
  }
  return std::nullopt;  // insufficient depth
}

namespace {

double liquidity_within_5bpts(const std::vector<BookLevel>& levels,
                              BookSide side) {
  if (levels.empty()) return 0.0;
  const double touch = levels.front().price;
  const double bound =
      side == BookSide::Ask ? touch * (1.0 + 5e-4) : touch * (1.0 - 5e-4);
  double total = 0.0;
  for (const auto& lvl : levels) {
    const bool inside =
        side == BookSide::Ask ? lvl.price <= bound : lvl.price >= bound;
    if (!inside) break;
    total += lvl.size_usd;
  }
  return total;
}

}  // namespace

DepthParameter select_depth_N(const std::string& market_id,
                              const AlignedBookSeries& books) {
  std::vector<double> ask_liq, bid_liq;
  for (std::size_t g = 0; g < books.book_idx.size(); ++g) {
    const BookSnapshot* snap = books.at(g);
    if (!snap) continue;
    ask_liq.push_back(liquidity_within_5bpts(snap->asks, BookSide::Ask));
    bid_liq.push_back(liquidity_within_5bpts(snap->bids, BookSide::Bid));
  }
  DepthParameter out;
  out.market_id = market_id;
  if (ask_liq.empty()) {
    out.n_usd = 1.0;
    return out;
  }
  const double n =
      0.5 * (stats::median(ask_liq) + stats::median(bid_liq));
  out.n_usd = std::max(1.0, n);
  return out;
}

std::optional<double> imbalance(const BookSnapshot& book, double n_usd,
                                BookSide side) {
  const auto& levels = side == BookSide::Ask ? book.asks : book.bids;
  if (levels.empty()) return std::nullopt;
  const double top = levels.front().price;  // p(1) is the touch price
  const auto avg = avg_exec_price(book, side, std::max(1.0, n_usd));
  if (!avg) return std::nullopt;
  if (side == BookSide::Ask) return (*avg / top - 1.0) * 1e4;
  return (top / *avg - 1.0) * 1e4;
}

Series imbalance_series(const SampledPanel& panel, const std::string& market,
                        double n_usd, BookSide side) {
  const auto& series = panel.markets.at(market);
  Series out(panel.n_samples(), std::nullopt);
  for (std::size_t g = 0; g < panel.n_samples(); ++g) {
    const BookSnapshot* snap = series.books.at(g);
    if (snap) out[g] = imbalance(*snap, n_usd, side);
  }
  return out;
}

Series classical_imbalance_series(const SampledPanel& panel,
                                  const std::string& market) {
  const auto& series = panel.markets.at(market);
  Series out(panel.n_samples(), std::nullopt);
  for (std::size_t g = 0; g < panel.n_samples(); ++g) {
    const BookSnapshot* snap = series.books.at(g);
    if (snap && !snap->bids.empty() && !snap->asks.empty())
      out[g] = classical_imbalance(*snap);
  }
  return out;
}

namespace {

std::size_t horizon_steps(const SampledPanel& panel, std::int64_t delta_ms) {
  if (delta_ms <= 0 || delta_ms % panel.grid_ms != 0)
    throw std::invalid_argument("horizon must be a positive multiple of the grid");
  return static_cast<std::size_t>(delta_ms / panel.grid_ms);
}

}  // namespace

Series tfi_series(const SampledPanel& panel, const std::string& market,
                  std::int64_t delta_ms) {
  const auto& trades = panel.markets.at(market).trades;
  const std::size_t k = horizon_steps(panel, delta_ms);
  const std::size_t n = panel.n_samples();
  Series out(n, std::nullopt);
  // prefix sums of per-bucket signed flow
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t g = 0; g < n; ++g)
    prefix[g + 1] =
        prefix[g] + trades.buy_volume_usd[g] - trades.sell_volume_usd[g];
  for (std::size_t g = k - 1; g < n; ++g)
    out[g] = prefix[g + 1] - prefix[g + 1 - k];
  return out;
}

Series pret_series(const SampledPanel& panel, const std::string& market,
                   std::int64_t delta_ms) {
  const auto& trades = panel.markets.at(market).trades;
  const std::size_t k = horizon_steps(panel, delta_ms);
  const std::size_t n = panel.n_samples();
  Series out(n, std::nullopt);
  for (std::size_t g = k; g < n; ++g) {
    const auto& now = trades.vwap[g];
    const auto& then = trades.vwap[g - k];
    if (now && then && *then > 0.0) out[g] = (*now / *then - 1.0) * 1e4;
  }
  return out;
}

Series div_series(const SampledPanel& panel, const std::string& market_i,
                  const std::string& market_j, std::int64_t lookback_ms) {
  const auto& vi = panel.markets.at(market_i).trades.vwap;
  const auto& vj = panel.markets.at(market_j).trades.vwap;
  const std::size_t k = horizon_steps(panel, lookback_ms);
  const std::size_t n = panel.n_samples();
  Series d(n, std::nullopt);
  for (std::size_t g = 0; g < n; ++g)
    if (vi[g] && vj[g] && *vj[g] > 0.0) d[g] = (*vi[g] / *vj[g] - 1.0) * 1e4;

  // prefix sum/count of defined d values for O(1) window means
  std::vector<double> psum(n + 1, 0.0);
  std::vector<std::size_t> pcnt(n + 1, 0);
  for (std::size_t g = 0; g < n; ++g) {
    psum[g + 1] = psum[g] + (d[g] ? *d[g] : 0.0);
    pcnt[g + 1] = pcnt[g] + (d[g] ? 1 : 0);
  }

  Series out(n, std::nullopt);
  for (std::size_t g = 0; g < n; ++g) {
    if (!d[g] || g + 1 < k) continue;  // window (t-Delta, t] must fit the grid
    const std::size_t lo = g + 1 - k;
    const std::size_t cnt = pcnt[g + 1] - pcnt[lo];
    if (cnt == 0) continue;
    const double mean = (psum[g + 1] - psum[lo]) / static_cast<double>(cnt);
    out[g] = *d[g] - mean;
  }
  return out;
}

Series fret_series(const SampledPanel& panel, const std::string& market,
                   std::int64_t delta_ms) {
  const auto& trades = panel.markets.at(market).trades;
  const std::size_t k = horizon_steps(panel, delta_ms);
  const std::size_t n = panel.n_samples();
  Series out(n, std::nullopt);
  for (std::size_t g = 0; g + k < n; ++g) {
    const auto& now = trades.vwap[g];
    const auto& later = trades.vwap[g + k];
    if (now && later && *now > 0.0) out[g] = (*later / *now - 1.0) * 1e4;
  }
  return out;
}

int FeatureMatrix::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

const Series& FeatureMatrix::column(const std::string& name) const {
  const int idx = column_index(name);
  if (idx < 0) throw std::out_of_range("no such column: " + name);
  return values[idx];
}

FeatureMatrix build_feature_matrix(
    const SampledPanel& panel, const FeatureConfig& config,
    const std::map<std::string, double>* depth_override) {
  FeatureMatrix m;
  m.ts = panel.ts;

  std::map<std::string, double> depth;
  for (const auto& [id, series] : panel.markets) {
    if (depth_override && depth_override->count(id)) {
      depth[id] = std::max(1.0, depth_override->at(id));
    } else {
      depth[id] = select_depth_N(id, series.books).n_usd;
    }
  }

  auto add = [&](const FeatureKey& key, Series&& column) {
    m.columns.push_back(key.column_name());
    m.values.push_back(std::move(column));
  };

  for (const auto& [id, series] : panel.markets) {
    add({id, FeatureFamily::IMBa, 0, ""},
        imbalance_series(panel, id, depth[id], BookSide::Ask));
    add({id, FeatureFamily::IMBb, 0, ""},
        imbalance_series(panel, id, depth[id], BookSide::Bid));
    for (const std::int64_t h : config.tfi_horizons_ms)
      add({id, FeatureFamily::TFI, h, ""}, tfi_series(panel, id, h));
    for (const std::int64_t h : config.pret_horizons_ms)
      add({id, FeatureFamily::PRET, h, ""}, pret_series(panel, id, h));
    for (const auto& [other, other_series] : panel.markets) {
      if (other == id) continue;
      for (const std::int64_t h : config.div_horizons_ms)
        add({id, FeatureFamily::DIV, h, other},
            div_series(panel, id, other, h));
    }
  }
  for (const auto& [id, series] : panel.markets) {
    for (const std::int64_t h : config.fret_horizons_ms) {
      m.columns.push_back("fret|" + id + "|" + std::to_string(h));
      m.values.push_back(fret_series(panel, id, h));
    }
  }
  return m;
}

void write_feature_csv(const FeatureMatrix& m, const std::string& path) {
  csv::Table table;
  table.columns.push_back("ts_ms");
  for (const auto& c : m.columns) table.columns.push_back(c);
  table.rows.reserve(m.ts.size());
  for (std::size_t r = 0; r < m.ts.size(); ++r) {
    std::vector<std::optional<double>> row;
    row.reserve(table.columns.size());
    row.emplace_back(static_cast<double>(m.ts[r]));
    for (const auto& col : m.values) row.push_back(col[r]);
    table.rows.push_back(std::move(row));
  }
  csv::write(table, path);
}

FeatureMatrix read_feature_csv(const std::string& path) {
  const csv::Table table = csv::read(path);
  if (table.columns.empty() || table.columns[0] != "ts_ms")
    throw std::runtime_error("feature csv must start with ts_ms column");
  FeatureMatrix m;
  m.ts.reserve(table.n_rows());
  for (const auto& row : table.rows) {
    if (!row[0]) throw std::runtime_error("missing ts_ms value");
    m.ts.push_back(static_cast<std::int64_t>(*row[0]));
  }
  for (std::size_t c = 1; c < table.columns.size(); ++c) {
    m.columns.push_back(table.columns[c]);
    Series col(table.n_rows());
    for (std::size_t r = 0; r < table.n_rows(); ++r) col[r] = table.rows[r][c];
    m.values.push_back(std::move(col));
  }
  return m;
}

}  // namespace crossflow
