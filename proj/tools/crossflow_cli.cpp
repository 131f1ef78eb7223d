// crossflow: cross-venue microstructure research pipeline.
//
// Subcommands cover the full flow from synthetic data generation through
// resampling, features, transform calibration, model fitting, lead-lag
// analysis, taker backtests and the maker simulation. Every command is a
// pure function of its input files plus the config; identical inputs and
// --seed reproduce outputs byte for byte.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "crossflow/backtest.hpp"
#include "crossflow/config.hpp"
#include "crossflow/csv.hpp"
#include "crossflow/datagen.hpp"
#include "crossflow/features.hpp"
#include "crossflow/leadlag.hpp"
#include "crossflow/maker.hpp"
#include "crossflow/models.hpp"
#include "crossflow/stats.hpp"
#include "crossflow/transform.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;
using namespace crossflow;

namespace {

RunConfig load_config(const std::string& path) {
  RunConfig cfg = path.empty() ? RunConfig::defaults() : RunConfig::load(path);
  cfg.validate();
  return cfg;
}

void require_file(const std::string& path, const std::string& producer) {
  if (!fs::exists(path))
    throw std::runtime_error("missing input " + path +
                             "; produce it with `crossflow " + producer + "`");
}

std::string slug(const std::string& market) {
  std::string s = market;
  for (char& c : s)
    if (c == '/' || c == ':') c = '_';
  return s;
}

std::vector<std::string> panel_markets(const FeatureMatrix& m) {
  std::vector<std::string> out;
  for (const auto& col : m.columns) {
    if (col.rfind("fret|", 0) != 0) continue;
    const auto bar = col.find('|', 5);
    const std::string id = col.substr(5, bar - 5);
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
  }
  return out;
}

std::vector<MakerSignal> read_signals_csv(const std::string& path) {
  const csv::Table t = csv::read(path);
  const int c_ts = t.column_index("ts_ms");
  const int c_pred = t.column_index("prediction");
  const int c_mtfi = t.column_index("mtfi");
  if (c_ts < 0 || c_pred < 0)
    throw std::runtime_error("signals csv needs ts_ms and prediction columns");
  std::vector<MakerSignal> out;
  for (const auto& row : t.rows) {
    MakerSignal s;
    s.ts_ms = static_cast<std::int64_t>(*row[c_ts]);
    s.prediction = *row[c_pred];
    s.mtfi = c_mtfi >= 0 && row[c_mtfi] ? *row[c_mtfi] : 0.0;
    out.push_back(s);
  }
  return out;
}

void write_signals_csv(const std::vector<MakerSignal>& signals,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "ts_ms,prediction,mtfi\n";
  for (const auto& s : signals)
    out << s.ts_ms << ',' << csv::format_double(s.prediction) << ','
        << csv::format_double(s.mtfi) << '\n';
}

int cmd_gen(const std::string& kind, std::uint64_t seed,
            std::int64_t duration_ms, int n_markets,
            std::vector<std::int64_t> lags, double informedness,
            double collapse_every_s, bool sweeps, double benign_every_s,
            const std::string& out_dir) {
  fs::create_directories(out_dir);
  if (kind == "panel") {
    GenConfig cfg;
    cfg.seed = seed;
    cfg.duration_ms = duration_ms;
    cfg.n_markets = n_markets;
    if (!lags.empty()) cfg.lag_ms = lags;
    cfg.lag_ms.resize(static_cast<std::size_t>(n_markets),
                      cfg.lag_ms.empty() ? 0 : cfg.lag_ms.back());
    cfg.informedness = informedness;
    const GenOutput out = gen_panel(cfg);
    for (const auto& [id, books] : out.books)
      write_books_ndjson(books, out_dir + "/" + slug(id) + ".books.ndjson");
    for (const auto& [id, trades] : out.trades)
      write_trades_ndjson(trades, out_dir + "/" + slug(id) + ".trades.ndjson");
    return 0;
  }
  if (kind == "l3") {
    L3GenConfig cfg;
    cfg.seed = seed;
    cfg.duration_ms = duration_ms;
    cfg.collapse_every_ms =
        static_cast<std::int64_t>(collapse_every_s * 1000.0);
    cfg.sweeps = sweeps;
    cfg.benign_every_ms = static_cast<std::int64_t>(benign_every_s * 1000.0);
    const L3GenOutput out = gen_l3_events(cfg);
    write_events_ndjson(out.events, out_dir + "/market.events.ndjson");
    write_signals_csv(out.signals, out_dir + "/signals.csv");
    csv::Table samples;
    samples.columns = {"ts_ms",        "top_ask_price", "top_ask_size",
                       "top_bid_price", "top_bid_size",  "mid_price",
                       "prediction"};
    for (std::size_t k = 0; k < out.sample_ts.size(); ++k)
      samples.rows.push_back({static_cast<double>(out.sample_ts[k]),
                              out.top_ask_price[k], out.top_ask_size[k],
                              out.top_bid_price[k], out.top_bid_size[k],
                              out.mid_price[k], out.predictions[k]});
    csv::write(samples, out_dir + "/samples.csv");
    return 0;
  }
  throw std::runtime_error("unknown gen kind: " + kind + " (panel|l3)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cross-venue microstructure research pipeline"};
  app.require_subcommand(1);
  app.fallthrough();  // allow --config/--seed after the subcommand

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (default: built-in)");
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "seed for all randomness");

  // gen
  auto* gen = app.add_subcommand("gen", "generate synthetic market data");
  std::string gen_kind = "panel";
  std::int64_t gen_duration = 60000;
  int gen_markets = 4;
  std::vector<std::int64_t> gen_lags;
  double gen_informedness = 0.5;
  double gen_collapse_every_s = 10.0;
  bool gen_sweeps = false;
  double gen_benign_every_s = 0.0;
  std::string gen_out = ".";
  gen->add_option("--kind", gen_kind, "panel | l3");
  gen->add_option("--duration-ms", gen_duration, "simulated span");
  gen->add_option("--n-markets", gen_markets, "markets in the panel");
  gen->add_option("--lag-ms", gen_lags, "per-market latent observation lag");
  gen->add_option("--informedness", gen_informedness, "taker flow informedness");
  gen->add_option("--collapse-every-s", gen_collapse_every_s,
                  "l3: planted collapse cadence (0 = off)");
  gen->add_flag("--sweeps", gen_sweeps, "l3: adverse sweep episodes");
  gen->add_option("--benign-every-s", gen_benign_every_s,
                  "l3: benign taker flow cadence (0 = off)");
  gen->add_option("--out", gen_out, "output directory");

  // resample
  auto* resample = app.add_subcommand("resample", "books+trades to a panel csv");
  std::vector<std::string> rs_books, rs_trades;
  std::int64_t rs_grid = 50;
  std::string rs_out = "panel.csv";
  resample->add_option("--books", rs_books, "*.books.ndjson inputs")->required();
  resample->add_option("--trades", rs_trades, "*.trades.ndjson inputs");
  resample->add_option("--grid-ms", rs_grid, "resampling grid");
  resample->add_option("--out", rs_out, "panel csv output");

  // features
  auto* features_cmd = app.add_subcommand("features", "panel csv to feature csv");
  std::string ft_panel = "panel.csv", ft_out = "features.csv";
  features_cmd->add_option("--panel", ft_panel, "panel csv")->required();
  features_cmd->add_option("--out", ft_out, "feature csv output");

  // calibrate-transform
  auto* cal = app.add_subcommand("calibrate-transform",
                                 "step-transform calibration for one feature");
  std::string cal_features = "features.csv", cal_column, cal_out = "transform.json";
  std::int64_t cal_delta = 500;
  cal->add_option("--features", cal_features, "feature csv")->required();
  cal->add_option("--feature", cal_column, "feature column to calibrate")->required();
  cal->add_option("--delta-ms", cal_delta, "target horizon");
  cal->add_option("--out", cal_out, "transform json output");

  // select-horizons
  auto* sel = app.add_subcommand("select-horizons",
                                 "optimal horizon per feature family");
  std::string sel_features = "features.csv", sel_out = "horizons.json";
  std::int64_t sel_delta = 500;
  sel->add_option("--features", sel_features, "feature csv")->required();
  sel->add_option("--delta-ms", sel_delta, "target horizon");
  sel->add_option("--out", sel_out, "json output");

  // leadlag
  auto* ll = app.add_subcommand("leadlag", "pairwise R^2 network");
  std::string ll_features = "features.csv", ll_prefix = "";
  std::int64_t ll_delta = 500;
  ll->add_option("--features", ll_features, "feature csv")->required();
  ll->add_option("--delta-ms", ll_delta, "target horizon");
  ll->add_option("--out-prefix", ll_prefix, "output path prefix");

  // fit
  auto* fit = app.add_subcommand("fit", "fit a model for one target market");
  std::string fit_kind, fit_features = "features.csv", fit_target,
              fit_out = "model.json";
  std::int64_t fit_delta = 500;
  std::vector<double> fit_lambdas;
  fit->add_option("kind", fit_kind, "baseline | lasso | meta")->required();
  fit->add_option("--features", fit_features, "feature csv")->required();
  fit->add_option("--target", fit_target, "target market")->required();
  fit->add_option("--delta-ms", fit_delta, "target horizon");
  fit->add_option("--lambda-grid", fit_lambdas, "lasso regularization grid");
  fit->add_option("--out", fit_out, "model json output (lasso: one per lambda)");

  // backtest
  auto* bt = app.add_subcommand("backtest", "pairwise taker walk-forward PnL");
  std::string bt_insample, bt_oos, bt_panel, bt_prefix = "";
  std::int64_t bt_delta = 500;
  bt->add_option("--features-insample", bt_insample, "in-sample feature csv")->required();
  bt->add_option("--features-oos", bt_oos, "out-of-sample feature csv")->required();
  bt->add_option("--panel-oos", bt_panel, "out-of-sample panel csv")->required();
  bt->add_option("--delta-ms", bt_delta, "target horizon");
  bt->add_option("--out-prefix", bt_prefix, "output path prefix");

  // maker-sim
  auto* mk = app.add_subcommand("maker-sim", "maker strategy simulation");
  std::string mk_events, mk_signals, mk_samples, mk_prefix = "";
  bool mk_benchmark = false;
  double mk_threshold = std::numeric_limits<double>::quiet_NaN();
  double mk_amount = -1.0;
  mk->add_option("--events", mk_events, "*.events.ndjson input")->required();
  mk->add_option("--signals", mk_signals, "signals csv (ts_ms,prediction,mtfi)")->required();
  mk->add_option("--samples", mk_samples,
                 "samples csv for calibration and reference prices");
  mk->add_flag("--benchmark", mk_benchmark, "never-cancel benchmark config");
  mk->add_option("--threshold", mk_threshold,
                 "cancel threshold T (default: calibrate from --samples)");
  mk->add_option("--amount", mk_amount, "order amount USD (default: config)");
  mk->add_option("--out-prefix", mk_prefix, "output path prefix");

  // report
  auto* rp = app.add_subcommand("report", "orderings for heatmap emission");
  std::string rp_what = "leadlag", rp_prefix = "";
  rp->add_option("what", rp_what, "leadlag");
  rp->add_option("--prefix", rp_prefix, "prefix used when running leadlag");

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig cfg = load_config(config_path);

    if (gen->parsed())
      return cmd_gen(gen_kind, seed, gen_duration, gen_markets, gen_lags,
                     gen_informedness, gen_collapse_every_s, gen_sweeps,
                     gen_benign_every_s, gen_out);

    if (resample->parsed()) {
      std::map<std::string, std::vector<BookSnapshot>> books;
      std::map<std::string, std::vector<TradeTick>> trades;
      for (const auto& path : rs_books) {
        require_file(path, "gen");
        for (auto& snap : read_books_ndjson(path))
          books[snap.market_id].push_back(std::move(snap));
      }
      for (const auto& path : rs_trades) {
        require_file(path, "gen");
        for (auto& tick : read_trades_ndjson(path))
          trades[tick.market_id].push_back(std::move(tick));
      }
      std::vector<RejectedRecord> rejected;
      const SampledPanel panel = build_panel(books, trades, rs_grid, &rejected);
      write_panel_csv(panel, rs_out);
      if (!rejected.empty())
        std::cerr << json{{"warning", "rejected records"},
                          {"count", rejected.size()}}
                  << '\n';
      return 0;
    }

    if (features_cmd->parsed()) {
      require_file(ft_panel, "resample");
      const SampledPanel panel = read_panel_csv(ft_panel);
      const FeatureMatrix m = build_feature_matrix(panel, cfg.features);
      write_feature_csv(m, ft_out);
      return 0;
    }

    if (cal->parsed()) {
      require_file(cal_features, "features");
      const FeatureMatrix m = read_feature_csv(cal_features);
      const Series& x_col = m.column(cal_column);
      std::vector<std::string> fret_cols;
      for (const auto& c : m.columns)
        if (c.rfind("fret|", 0) == 0 &&
            c.rfind("|" + std::to_string(cal_delta)) ==
                c.size() - std::to_string(cal_delta).size() - 1)
          fret_cols.push_back(c);
      if (fret_cols.empty())
        throw std::runtime_error("no fret targets at delta " +
                                 std::to_string(cal_delta));
      // rows where x and every target are present
      std::vector<double> x;
      std::vector<std::vector<double>> ys(fret_cols.size());
      for (std::size_t r = 0; r < m.ts.size(); ++r) {
        if (!x_col[r]) continue;
        bool ok = true;
        for (const auto& c : fret_cols)
          if (!m.column(c)[r]) {
            ok = false;
            break;
          }
        if (!ok) continue;
        x.push_back(*x_col[r]);
        for (std::size_t j = 0; j < fret_cols.size(); ++j)
          ys[j].push_back(*m.column(fret_cols[j])[r]);
      }
      const CalibrationResult result = calibrate_transform(
          x, ys, cfg.transform.q, cfg.transform.n,
          FeatureKey::parse(cal_column));
      std::ofstream out(cal_out);
      out << result.transform.to_json() << '\n';
      return 0;
    }

    if (sel->parsed()) {
      require_file(sel_features, "features");
      const FeatureMatrix m = read_feature_csv(sel_features);
      const auto markets = panel_markets(m);
      json out;
      struct FamilyGrid {
        FeatureFamily family;
        const std::vector<std::int64_t>* horizons;
      };
      const std::vector<FamilyGrid> grids = {
          {FeatureFamily::TFI, &cfg.features.tfi_horizons_ms},
          {FeatureFamily::PRET, &cfg.features.pret_horizons_ms},
          {FeatureFamily::DIV, &cfg.features.div_horizons_ms}};
      for (const auto& grid : grids) {
        // per family: average univariate R^2 over (market column, market
        // target) pairs per horizon, argmax with ties to smallest horizon
        std::vector<double> avg(grid.horizons->size(), 0.0);
        for (std::size_t hi = 0; hi < grid.horizons->size(); ++hi) {
          double total = 0.0;
          std::size_t count = 0;
          for (const auto& id : markets) {
            std::vector<std::string> cols;
            if (grid.family == FeatureFamily::DIV) {
              for (const auto& other : markets)
                if (other != id)
                  cols.push_back(FeatureKey{id, FeatureFamily::DIV,
                                            (*grid.horizons)[hi], other}
                                     .column_name());
            } else {
              cols.push_back(FeatureKey{id, grid.family, (*grid.horizons)[hi],
                                        ""}
                                 .column_name());
            }
            const Series& target =
                m.column("fret|" + id + "|" + std::to_string(sel_delta));
            for (const auto& cname : cols) {
              if (m.column_index(cname) < 0) continue;
              const Series& f = m.column(cname);
              std::vector<double> xs, ys2;
              for (std::size_t r = 0; r < m.ts.size(); ++r)
                if (f[r] && target[r]) {
                  xs.push_back(*f[r]);
                  ys2.push_back(*target[r]);
                }
              total += stats::univariate_r2(xs, ys2);
              ++count;
            }
          }
          avg[hi] = count ? total / static_cast<double>(count) : 0.0;
        }
        std::size_t best = 0;
        for (std::size_t hi = 1; hi < avg.size(); ++hi)
          if (avg[hi] > avg[best]) best = hi;
        json fam;
        fam["horizon_ms"] = (*grid.horizons)[best];
        fam["avg_r2_by_horizon"] = json::object();
        for (std::size_t hi = 0; hi < avg.size(); ++hi)
          fam["avg_r2_by_horizon"][std::to_string((*grid.horizons)[hi])] =
              avg[hi];
        out[to_string(grid.family)] = fam;
      }
      std::ofstream os(sel_out);
      os << out.dump(2) << '\n';
      return 0;
    }

    if (ll->parsed()) {
      require_file(ll_features, "features");
      const FeatureMatrix m = read_feature_csv(ll_features);
      LeadLagConfig llc;
      llc.fret_delta_ms = ll_delta;
      const LeadLagMatrix matrix =
          pairwise_r2_matrix(m, panel_markets(m), llc);
      write_leadlag_csv(matrix, ll_prefix);
      return 0;
    }

    if (fit->parsed()) {
      require_file(fit_features, "features");
      const FeatureMatrix m = read_feature_csv(fit_features);
      const auto markets = panel_markets(m);
      const std::string target_col =
          "fret|" + fit_target + "|" + std::to_string(fit_delta);
      LeadLagConfig llc;
      llc.fret_delta_ms = fit_delta;
      // full cross-market covariate set: 5 per source market
      std::vector<std::string> cols;
      for (const auto& j : markets) {
        cols.push_back(FeatureKey{j, FeatureFamily::IMBa, 0, ""}.column_name());
        cols.push_back(FeatureKey{j, FeatureFamily::IMBb, 0, ""}.column_name());
        cols.push_back(
            FeatureKey{j, FeatureFamily::TFI, llc.tfi_horizon_ms, ""}
                .column_name());
        cols.push_back(
            FeatureKey{j, FeatureFamily::PRET, llc.pret_horizon_ms, ""}
                .column_name());
        if (j != fit_target)
          cols.push_back(FeatureKey{fit_target, FeatureFamily::DIV,
                                    llc.div_horizon_ms, j}
                             .column_name());
      }
      std::erase_if(cols,
                    [&](const std::string& c) { return m.column_index(c) < 0; });

      if (fit_kind == "baseline") {
        const DenseData data = dense_rows(m, cols, target_col);
        const FitResult result = fit_ols(data, target_col, fit_delta);
        std::ofstream out(fit_out);
        out << result.to_json() << '\n';
        return 0;
      }
      if (fit_kind == "lasso") {
        const DenseData data = dense_rows(m, cols, target_col);
        const std::vector<double> grid =
            fit_lambdas.empty() ? cfg.models.lambda_grid : fit_lambdas;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          const FitResult result =
              fit_lasso(data, grid[i], target_col, fit_delta);
          std::string path = fit_out;
          const auto dot = path.rfind(".json");
          const std::string tag = "_lambda" + std::to_string(i);
          if (dot != std::string::npos)
            path.insert(dot, tag);
          else
            path += tag;
          std::ofstream out(path);
          out << result.to_json() << '\n';
        }
        return 0;
      }
      if (fit_kind == "meta") {
        // meta features: per family, weight each source market's column
        // by its univariate R^2 against the target, normalized to max 1
        const Series& target = m.column(target_col);
        std::vector<std::string> meta_names;
        std::vector<std::vector<double>> meta_cols;
        std::vector<std::size_t> keep_rows;
        // rows where every involved column is present
        std::vector<const Series*> all_cols;
        for (const auto& c : cols) all_cols.push_back(&m.column(c));
        for (std::size_t r = 0; r < m.ts.size(); ++r) {
          if (!target[r]) continue;
          bool ok = true;
          for (const auto* c : all_cols)
            if (!(*c)[r]) {
              ok = false;
              break;
            }
          if (ok) keep_rows.push_back(r);
        }
        std::vector<double> y;
        for (const auto r : keep_rows) y.push_back(*target[r]);
        struct Fam {
          FeatureFamily family;
          const char* meta_name;
        };
        const std::vector<Fam> fams = {{FeatureFamily::IMBa, "mIMBa"},
                                       {FeatureFamily::IMBb, "mIMBb"},
                                       {FeatureFamily::TFI, "mTFI"},
                                       {FeatureFamily::PRET, "mPRET"},
                                       {FeatureFamily::DIV, "mDIV"}};
        FeatureMatrix meta;
        meta.ts.reserve(keep_rows.size());
        for (const auto r : keep_rows) meta.ts.push_back(m.ts[r]);
        for (const auto& fam : fams) {
          std::vector<std::string> sources;
          std::vector<std::vector<double>> source_cols;
          for (const auto& c : cols) {
            const FeatureKey key = FeatureKey::parse(c);
            if (key.family != fam.family) continue;
            std::vector<double> col;
            const Series& s = m.column(c);
            for (const auto r : keep_rows) col.push_back(*s[r]);
            sources.push_back(key.family == FeatureFamily::DIV
                                  ? key.counterparty_market
                                  : key.market_id);
            source_cols.push_back(std::move(col));
          }
          if (source_cols.empty()) continue;
          const MetaWeights w = meta_weights(sources, source_cols, y);
          meta.columns.push_back(fam.meta_name);
          Series s;
          for (const double v : weighted_sum(source_cols, w.weights))
            s.push_back(v);
          meta.values.push_back(std::move(s));
        }
        meta.columns.push_back(target_col);
        Series ty;
        for (const double v : y) ty.push_back(v);
        meta.values.push_back(std::move(ty));
        const DenseData data = dense_rows(
            meta,
            std::vector<std::string>(meta.columns.begin(),
                                     meta.columns.end() - 1),
            target_col);
        const FitResult result = fit_ols(data, target_col, fit_delta);
        std::ofstream out(fit_out);
        out << result.to_json() << '\n';
        return 0;
      }
      throw std::runtime_error("unknown fit kind: " + fit_kind);
    }

    if (bt->parsed()) {
      require_file(bt_insample, "features");
      require_file(bt_oos, "features");
      require_file(bt_panel, "resample");
      const FeatureMatrix ins = read_feature_csv(bt_insample);
      const FeatureMatrix oos = read_feature_csv(bt_oos);
      const SampledPanel panel = read_panel_csv(bt_panel);
      LeadLagConfig llc;
      llc.fret_delta_ms = bt_delta;
      const auto markets = panel_markets(ins);
      const LeadLagMatrix models = pairwise_r2_matrix(ins, markets, llc);
      std::map<std::string, MarketSpec> specs = cfg.markets;
      for (const auto& id : markets) {
        if (specs.count(id)) continue;
        MarketSpec spec;  // synthetic market: default fees
        spec.market_id = id;
        specs[id] = spec;
      }
      const PnLMatrix pnl = pnl_matrix(models, ins, oos, panel, specs);
      write_pnl_csv(pnl, bt_prefix);
      return 0;
    }

    if (mk->parsed()) {
      require_file(mk_events, "gen --kind l3");
      require_file(mk_signals, "gen --kind l3");
      const auto events = read_events_ndjson(mk_events);
      const auto signals = read_signals_csv(mk_signals);

      MakerParams params = cfg.maker;
      if (mk_amount > 0.0) params.amount_usd = mk_amount;
      if (mk_benchmark)
        params = MakerParams::benchmark(params.amount_usd, params.tick);
      else if (!std::isnan(mk_threshold))
        params.cancel_threshold = mk_threshold;
      else if (!mk_samples.empty()) {
        const csv::Table t = csv::read(mk_samples);
        std::vector<std::int64_t> ts;
        std::vector<double> apx, asz, pred;
        const int c_ts = t.column_index("ts_ms");
        const int c_apx = t.column_index("top_ask_price");
        const int c_asz = t.column_index("top_ask_size");
        const int c_pred = t.column_index("prediction");
        for (const auto& row : t.rows) {
          ts.push_back(static_cast<std::int64_t>(*row[c_ts]));
          apx.push_back(*row[c_apx]);
          asz.push_back(*row[c_asz]);
          pred.push_back(*row[c_pred]);
        }
        const CancelCalibration calib =
            calibrate_cancel_threshold(ts, apx, asz, pred);
        params.cancel_threshold = calib.threshold;
        std::cerr << json{{"calibrated_threshold", calib.threshold},
                          {"n_qualifying", calib.n_qualifying}}
                  << '\n';
      }

      const MakerResult result = run_maker_strategy(events, signals, params);
      write_fills_csv(result.fills, mk_prefix + "fills.csv");
      if (!mk_samples.empty()) {
        const csv::Table t = csv::read(mk_samples);
        const int c_ts = t.column_index("ts_ms");
        const int c_mid = t.column_index("mid_price");
        std::vector<std::int64_t> ts;
        std::vector<double> mid;
        for (const auto& row : t.rows) {
          ts.push_back(static_cast<std::int64_t>(*row[c_ts]));
          mid.push_back(*row[c_mid]);
        }
        write_pnl_path_csv(
            pnl_timeseries(result.fills, ts, mid, params.maker_rebate_bpts),
            mk_prefix + "pnl_path.csv");
        write_adverse_csv(adverse_selection(result.fills, ts, mid),
                          mk_prefix + "adverse_selection.csv");
      }
      return 0;
    }

    if (rp->parsed()) {
      if (rp_what != "leadlag")
        throw std::runtime_error("unknown report: " + rp_what);
      const std::string path = rp_prefix + "leadlag_r2.csv";
      require_file(path, "leadlag");
      std::ifstream in(path);
      std::string header;
      std::getline(in, header);
      std::vector<std::string> markets;
      std::vector<std::vector<double>> r2;
      std::string line;
      while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        markets.push_back(cell);
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        r2.push_back(std::move(row));
      }
      LeadLagMatrix matrix;
      matrix.markets = markets;
      matrix.r2 = r2;
      matrix.row_avg.resize(markets.size());
      matrix.col_avg.resize(markets.size());
      for (std::size_t i = 0; i < markets.size(); ++i) {
        double rs = 0.0, cs = 0.0;
        for (std::size_t j = 0; j < markets.size(); ++j) {
          rs += r2[i][j];
          cs += r2[j][i];
        }
        matrix.row_avg[i] = rs / static_cast<double>(markets.size());
        matrix.col_avg[i] = cs / static_cast<double>(markets.size());
      }
      const LeadLagOrdering ordering = rank_leaders(matrix);
      auto write_order = [&](const std::string& name,
                             const std::vector<std::string>& order) {
        std::ofstream out(rp_prefix + name);
        out << "market\n";
        for (const auto& id : order) out << id << '\n';
      };
      write_order("leadlag_order_rowsum.csv", ordering.by_row_sum);
      write_order("leadlag_order_colsum.csv", ordering.by_col_sum);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}}.dump() << '\n';
    return 1;
  }
  return 0;
}
