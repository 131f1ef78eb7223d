#include "crossflow/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "crossflow/models.hpp"

using json = nlohmann::json;

namespace crossflow {

namespace {

struct FeeRow {
  const char* id;
  double fee_vip, fee_default;
  double tick;
  double maker_rebate;
  MarginKind margin;
  InstrumentKind kind;
};

// reference universe: lowest-possible and default taker fees in bpts
constexpr FeeRow kFeeTable[] = {
    {"ftx_BTC-PERP", 1.5, 7.0, 1.0, 0.0, MarginKind::USDT, InstrumentKind::Perpetual},
    {"binancefut_BTC/USDT", 1.53, 4.0, 0.1, 0.0, MarginKind::USDT, InstrumentKind::Perpetual},
    {"binancecmfut_BTC/USD", 1.8, 5.0, 0.1, 0.0, MarginKind::BTC, InstrumentKind::Perpetual},
    {"huobipro_BTC/USDT", 1.93, 4.75, 0.01, 0.0, MarginKind::None, InstrumentKind::Spot},
    {"hbdm_BTC_CQ", 2.0, 4.0, 0.01, 0.0, MarginKind::BTC, InstrumentKind::Futures},
    {"okex_BTC-USD-210326", 2.5, 5.0, 0.01, 0.0, MarginKind::BTC, InstrumentKind::Futures},
    {"thbdm_BTC-USDT", 2.7, 4.0, 0.1, 0.0, MarginKind::USDT, InstrumentKind::Perpetual},
    {"okex_BTC-USD-SWAP", 3.0, 5.0, 0.1, 0.0, MarginKind::BTC, InstrumentKind::Perpetual},
    {"okex_BTC-USDT-SWAP", 3.0, 5.0, 0.1, 0.0, MarginKind::USDT, InstrumentKind::Perpetual},
    {"hbdm_BTC-USD", 3.7, 5.0, 0.1, 0.0, MarginKind::BTC, InstrumentKind::Perpetual},
    {"deribit_BTC-PERPETUAL", 5.0, 5.0, 0.5, 0.0, MarginKind::BTC, InstrumentKind::Perpetual},
    {"bitmex_BTC/USD", 7.5, 7.5, 0.5, 0.0, MarginKind::BTC, InstrumentKind::Perpetual},
    {"bybit_BTC/USD", 7.5, 7.5, 0.5, 2.5, MarginKind::BTC, InstrumentKind::Perpetual},
    {"tbybit_BTC/USDT", 7.5, 7.5, 0.5, 2.5, MarginKind::USDT, InstrumentKind::Perpetual},
};

json spec_to_json(const MarketSpec& spec) {
  json j;
  j["instrument"] = to_string(spec.instrument_kind);
  j["margin"] = to_string(spec.margin);
  j["tick_size"] = spec.tick_size;
  j["taker_fee_default_bpts"] = spec.taker_fee_default_bpts;
  j["taker_fee_vip_bpts"] = spec.taker_fee_vip_bpts;
  j["maker_rebate_bpts"] = spec.maker_rebate_bpts;
  return j;
}

MarketSpec spec_from_json(const std::string& id, const json& j) {
  MarketSpec spec;
  spec.market_id = id;
  spec.instrument_kind =
      instrument_kind_from_string(j.at("instrument").get<std::string>());
  spec.margin = margin_kind_from_string(j.at("margin").get<std::string>());
  spec.tick_size = j.at("tick_size").get<double>();
  spec.taker_fee_default_bpts = j.at("taker_fee_default_bpts").get<double>();
  spec.taker_fee_vip_bpts = j.at("taker_fee_vip_bpts").get<double>();
  spec.maker_rebate_bpts = j.value("maker_rebate_bpts", 0.0);
  return spec;
}

}  // namespace

RunConfig RunConfig::defaults() {
  RunConfig cfg;
  for (const auto& row : kFeeTable) {
    MarketSpec spec;
    spec.market_id = row.id;
    spec.instrument_kind = row.kind;
    spec.margin = row.margin;
    spec.tick_size = row.tick;
    spec.taker_fee_default_bpts = row.fee_default;
    spec.taker_fee_vip_bpts = row.fee_vip;
    spec.maker_rebate_bpts = row.maker_rebate;
    cfg.markets[spec.market_id] = spec;
  }
  cfg.models.lambda_grid = lasso_lambda_grid();
  return cfg;
}

std::string RunConfig::to_json_text() const {
  json j;
  json mkts = json::object();
  for (const auto& [id, spec] : markets) mkts[id] = spec_to_json(spec);
  j["markets"] = mkts;
  j["features"] = {{"tfi_horizons_ms", features.tfi_horizons_ms},
                   {"pret_horizons_ms", features.pret_horizons_ms},
                   {"div_horizons_ms", features.div_horizons_ms},
                   {"fret_horizons_ms", features.fret_horizons_ms}};
  j["transform"] = {{"q", transform.q},
                    {"n", transform.n},
                    {"adopt_tfi", transform.adopt_tfi},
                    {"adopt_pret_when_improved",
                     transform.adopt_pret_when_improved},
                    {"adopt_imb", transform.adopt_imb},
                    {"adopt_div", transform.adopt_div}};
  j["models"] = {{"lambda_grid", models.lambda_grid},
                 {"primary_delta_ms", models.primary_delta_ms}};
  j["backtest"] = {{"threshold_percentile", backtest.threshold_percentile}};
  j["maker"] = {{"cancel_threshold", maker.cancel_threshold},
                {"flow_gate", maker.flow_gate},
                {"amount_usd", maker.amount_usd},
                {"tick", maker.tick},
                {"rate_capacity", maker.rate_capacity},
                {"rate_refill_per_minute", maker.rate_refill_per_minute},
                {"initial_position", maker.initial_position},
                {"maker_rebate_bpts", maker.maker_rebate_bpts}};
  return j.dump(2);
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  const json j = json::parse(text);
  RunConfig cfg;
  if (j.contains("markets"))
    for (const auto& [id, spec] : j.at("markets").items())
      cfg.markets[id] = spec_from_json(id, spec);
  if (j.contains("features")) {
    const json& f = j.at("features");
    if (f.contains("tfi_horizons_ms"))
      cfg.features.tfi_horizons_ms =
          f.at("tfi_horizons_ms").get<std::vector<std::int64_t>>();
    if (f.contains("pret_horizons_ms"))
      cfg.features.pret_horizons_ms =
          f.at("pret_horizons_ms").get<std::vector<std::int64_t>>();
    if (f.contains("div_horizons_ms"))
      cfg.features.div_horizons_ms =
          f.at("div_horizons_ms").get<std::vector<std::int64_t>>();
    if (f.contains("fret_horizons_ms"))
      cfg.features.fret_horizons_ms =
          f.at("fret_horizons_ms").get<std::vector<std::int64_t>>();
  }
  if (j.contains("transform")) {
    const json& t = j.at("transform");
    cfg.transform.q = t.value("q", cfg.transform.q);
    cfg.transform.n = t.value("n", cfg.transform.n);
    cfg.transform.adopt_tfi = t.value("adopt_tfi", cfg.transform.adopt_tfi);
    cfg.transform.adopt_pret_when_improved = t.value(
        "adopt_pret_when_improved", cfg.transform.adopt_pret_when_improved);
    cfg.transform.adopt_imb = t.value("adopt_imb", cfg.transform.adopt_imb);
    cfg.transform.adopt_div = t.value("adopt_div", cfg.transform.adopt_div);
  }
  if (j.contains("models")) {
    const json& m = j.at("models");
    if (m.contains("lambda_grid"))
      cfg.models.lambda_grid = m.at("lambda_grid").get<std::vector<double>>();
    cfg.models.primary_delta_ms =
        m.value("primary_delta_ms", cfg.models.primary_delta_ms);
  }
  if (cfg.models.lambda_grid.empty())
    cfg.models.lambda_grid = lasso_lambda_grid();
  if (j.contains("backtest"))
    cfg.backtest.threshold_percentile = j.at("backtest").value(
        "threshold_percentile", cfg.backtest.threshold_percentile);
  if (j.contains("maker")) {
    const json& m = j.at("maker");
    cfg.maker.cancel_threshold =
        m.value("cancel_threshold", cfg.maker.cancel_threshold);
    cfg.maker.flow_gate = m.value("flow_gate", cfg.maker.flow_gate);
    cfg.maker.amount_usd = m.value("amount_usd", cfg.maker.amount_usd);
    cfg.maker.tick = m.value("tick", cfg.maker.tick);
    cfg.maker.rate_capacity =
        m.value("rate_capacity", cfg.maker.rate_capacity);
    cfg.maker.rate_refill_per_minute =
        m.value("rate_refill_per_minute", cfg.maker.rate_refill_per_minute);
    cfg.maker.initial_position =
        m.value("initial_position", cfg.maker.initial_position);
    cfg.maker.maker_rebate_bpts =
        m.value("maker_rebate_bpts", cfg.maker.maker_rebate_bpts);
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

void RunConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config: " + path);
  out << to_json_text() << '\n';
}

std::vector<std::string> RunConfig::validation_errors() const {
  std::vector<std::string> errors;
  for (const auto& [id, spec] : markets) {
    if (spec.market_id != id)
      errors.push_back("markets." + id + ": market_id mismatch");
    if (spec.tick_size <= 0.0)
      errors.push_back("markets." + id + ".tick_size: must be > 0");
    if (spec.taker_fee_default_bpts < 0.0)
      errors.push_back("markets." + id + ".taker_fee_default_bpts: negative");
    if (spec.taker_fee_vip_bpts < 0.0)
      errors.push_back("markets." + id + ".taker_fee_vip_bpts: negative");
  }
  auto check_horizons = [&](const char* name,
                            const std::vector<std::int64_t>& hs) {
    if (hs.empty()) errors.push_back(std::string("features.") + name + ": empty");
    for (const auto h : hs)
      if (h <= 0)
        errors.push_back(std::string("features.") + name +
                         ": non-positive horizon");
  };
  check_horizons("tfi_horizons_ms", features.tfi_horizons_ms);
  check_horizons("pret_horizons_ms", features.pret_horizons_ms);
  check_horizons("div_horizons_ms", features.div_horizons_ms);
  check_horizons("fret_horizons_ms", features.fret_horizons_ms);
  if (transform.q <= 0.0 || transform.q >= 0.5)
    errors.push_back("transform.q: must be in (0, 0.5)");
  if (transform.n < 1) errors.push_back("transform.n: must be >= 1");
  if (models.lambda_grid.empty())
    errors.push_back("models.lambda_grid: empty");
  for (const double l : models.lambda_grid)
    if (l < 0.0) errors.push_back("models.lambda_grid: negative lambda");
  if (models.primary_delta_ms <= 0)
    errors.push_back("models.primary_delta_ms: must be > 0");
  if (backtest.threshold_percentile <= 0.0 ||
      backtest.threshold_percentile >= 1.0)
    errors.push_back("backtest.threshold_percentile: must be in (0, 1)");
  if (maker.amount_usd <= 0.0)
    errors.push_back("maker.amount_usd: must be > 0");
  if (maker.rate_capacity < 2.0)
    errors.push_back("maker.rate_capacity: must be >= 2");
  if (maker.tick <= 0.0) errors.push_back("maker.tick: must be > 0");
  return errors;
}

void RunConfig::validate() const {
  const auto errors = validation_errors();
  if (errors.empty()) return;
  std::string msg = "invalid config:";
  for (const auto& e : errors) msg += "\n  " + e;
  throw std::runtime_error(msg);
}

}  // namespace crossflow
