#include "crossflow/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <json.hpp>

#include "crossflow/stats.hpp"

using json = nlohmann::json;

namespace crossflow {

DenseData dense_rows(const FeatureMatrix& m,
                     const std::vector<std::string>& feature_cols,
                     const std::string& target_col) {
  DenseData data;
  data.feature_names = feature_cols;
  std::vector<const Series*> cols;
  for (const auto& name : feature_cols) cols.push_back(&m.column(name));
  const Series& target = m.column(target_col);

  data.X.resize(feature_cols.size());
  for (std::size_t r = 0; r < m.ts.size(); ++r) {
    if (!target[r]) continue;
    bool complete = true;
    for (const Series* col : cols)
      if (!(*col)[r]) {
        complete = false;
        break;
      }
    if (!complete) continue;
    for (std::size_t c = 0; c < cols.size(); ++c)
      data.X[c].push_back(*(*cols[c])[r]);
    data.y.push_back(*target[r]);
    data.ts.push_back(m.ts[r]);
  }
  return data;
}

double LinearModel::predict(std::span<const double> raw_row) const {
  if (raw_row.size() != coefficients.size())
    throw std::invalid_argument("prediction row width mismatch");
  double p = intercept;
  for (std::size_t i = 0; i < coefficients.size(); ++i)
    p += coefficients[i] * (raw_row[i] - means[i]) / stds[i];
  return p;
}

std::vector<double> LinearModel::predict_all(const DenseData& data) const {
  std::vector<double> out(data.n_rows());
  std::vector<double> row(coefficients.size());
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    for (std::size_t c = 0; c < data.n_features(); ++c) row[c] = data.X[c][r];
    out[r] = predict(row);
  }
  return out;
}

namespace {

struct Standardized {
  Eigen::MatrixXd Z;  // n x p, zero mean unit (population) variance
  std::vector<double> means, stds;
};

Standardized standardize(const DenseData& data) {
  const std::size_t n = data.n_rows();
  const std::size_t p = data.n_features();
  Standardized out;
  out.Z.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  out.means.resize(p);
  out.stds.resize(p);
  for (std::size_t c = 0; c < p; ++c) {
    out.means[c] = stats::mean(data.X[c]);
    out.stds[c] = stats::stddev(data.X[c]);
    if (!(out.stds[c] > 0.0))
      throw std::runtime_error("constant feature column: " +
                               data.feature_names[c]);
    for (std::size_t r = 0; r < n; ++r)
      out.Z(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          (data.X[c][r] - out.means[c]) / out.stds[c];
  }
  return out;
}

double r_squared(const std::vector<double>& y,
                 const std::vector<double>& pred) {
  const double my = stats::mean(y);
  double sse = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sse += (y[i] - pred[i]) * (y[i] - pred[i]);
    sst += (y[i] - my) * (y[i] - my);
  }
  if (sst <= 0.0) return 0.0;
  return 1.0 - sse / sst;
}

}  // namespace

FitResult fit_ols(const DenseData& data, const std::string& target,
                  std::int64_t delta_ms) {
  const std::size_t n = data.n_rows();
  const std::size_t p = data.n_features();
  if (n <= p + 1)
    throw std::runtime_error("fit_ols needs n_samples > n_features + 1");

  const Standardized st = standardize(data);
  Eigen::MatrixXd D(static_cast<Eigen::Index>(n),
                    static_cast<Eigen::Index>(p + 1));
  D.col(0).setOnes();
  D.rightCols(static_cast<Eigen::Index>(p)) = st.Z;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(D);
  if (qr.rank() < static_cast<Eigen::Index>(p + 1)) {
    // name the columns involved in the dependency
    std::string msg = "rank-deficient design; dependent column set spans:";
    for (const auto& name : data.feature_names) msg += " " + name;
    throw std::runtime_error(msg);
  }
  const Eigen::VectorXd yv =
      Eigen::Map<const Eigen::VectorXd>(data.y.data(),
                                        static_cast<Eigen::Index>(n));
  const Eigen::VectorXd beta = qr.solve(yv);

  FitResult result;
  result.model.target = target;
  result.model.delta_ms = delta_ms;
  result.model.feature_names = data.feature_names;
  result.model.intercept = beta(0);
  result.model.coefficients.assign(beta.data() + 1, beta.data() + 1 + p);
  result.model.means = st.means;
  result.model.stds = st.stds;

  const Eigen::VectorXd resid = yv - D * beta;
  const double sse = resid.squaredNorm();
  const double dof = static_cast<double>(n) - static_cast<double>(p) - 1.0;
  const double sigma2 = sse / dof;
  const Eigen::MatrixXd xtx_inv =
      (D.transpose() * D).ldlt().solve(
          Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p + 1),
                                    static_cast<Eigen::Index>(p + 1)));
  result.diagnostics.n_samples = n;
  result.diagnostics.t_stats.resize(p);
  result.diagnostics.p_values.resize(p);
  for (std::size_t c = 0; c < p; ++c) {
    const double se =
        std::sqrt(sigma2 * xtx_inv(static_cast<Eigen::Index>(c + 1),
                                   static_cast<Eigen::Index>(c + 1)));
    const double t = se > 0.0 ? beta(static_cast<Eigen::Index>(c + 1)) / se
                              : 0.0;
    result.diagnostics.t_stats[c] = t;
    result.diagnostics.p_values[c] = stats::t_pvalue_two_sided(t, dof);
  }
  result.diagnostics.r2_in_sample =
      r_squared(data.y, result.model.predict_all(data));
  return result;
}

FitResult fit_lasso(const DenseData& data, double lambda,
                    const std::string& target, std::int64_t delta_ms) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  const std::size_t n = data.n_rows();
  const std::size_t p = data.n_features();
  if (n < 2) throw std::runtime_error("fit_lasso needs >= 2 samples");

  const Standardized st = standardize(data);
  const double nd = static_cast<double>(n);
  const double y_mean = stats::mean(data.y);

  // columns have zero mean so the unpenalized intercept is mean(y);
  // residual r excludes the intercept contribution
  std::vector<double> w(p, 0.0);
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = data.y[i] - y_mean;

  std::vector<double> col_sq(p);  // (1/n) sum z^2 == 1 up to fp error
  for (std::size_t c = 0; c < p; ++c)
    col_sq[c] = st.Z.col(static_cast<Eigen::Index>(c)).squaredNorm() / nd;

  constexpr int kMaxSweeps = 100000;
  constexpr double kTol = 1e-8;
  double max_delta = 0.0;
  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    max_delta = 0.0;
    for (std::size_t c = 0; c < p; ++c) {
      const auto zc = st.Z.col(static_cast<Eigen::Index>(c));
      double rho = 0.0;
      for (std::size_t i = 0; i < n; ++i) rho += zc(static_cast<Eigen::Index>(i)) * r[i];
      rho = rho / nd + col_sq[c] * w[c];
      double w_new;
      if (rho > lambda) w_new = (rho - lambda) / col_sq[c];
      else if (rho < -lambda) w_new = (rho + lambda) / col_sq[c];
      else w_new = 0.0;
      const double delta = w_new - w[c];
      if (delta != 0.0) {
        for (std::size_t i = 0; i < n; ++i)
          r[i] -= delta * zc(static_cast<Eigen::Index>(i));
        w[c] = w_new;
      }
      max_delta = std::max(max_delta, std::fabs(delta));
    }
    if (max_delta < kTol) {
      converged = true;
      break;
    }
  }

  FitResult result;
  result.model.target = target;
  result.model.delta_ms = delta_ms;
  result.model.feature_names = data.feature_names;
  result.model.intercept = y_mean;
  result.model.coefficients = std::move(w);
  result.model.means = st.means;
  result.model.stds = st.stds;
  result.diagnostics.n_samples = n;
  result.diagnostics.converged = converged;
  result.diagnostics.last_delta = max_delta;
  result.diagnostics.r2_in_sample =
      r_squared(data.y, result.model.predict_all(data));
  return result;
}

std::vector<double> lasso_lambda_grid() {
  std::vector<double> grid;
  double v = 0.001;
  for (int k = 0; k <= 8; ++k, v *= 2.0) grid.push_back(v);
  return grid;
}

int count_nonzero(const LinearModel& model) {
  int count = 0;
  for (const double c : model.coefficients)
    if (c != 0.0) ++count;
  return count;
}

std::int64_t select_horizon(
    const std::vector<std::int64_t>& horizons,
    const std::vector<Series>& feature_by_horizon,
    const std::vector<Series>& targets) {
  if (horizons.size() < 2)
    throw std::invalid_argument("select_horizon needs >= 2 horizons");
  if (horizons.size() != feature_by_horizon.size())
    throw std::invalid_argument("horizon/feature count mismatch");

  // iterate horizons in ascending order so ties keep the smallest
  std::vector<std::size_t> order(horizons.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return horizons[a] < horizons[b]; });

  double best_r2 = -1.0;
  std::int64_t best_h = horizons[order[0]];
  for (const std::size_t idx : order) {
    const Series& f = feature_by_horizon[idx];
    double total = 0.0;
    for (const Series& y : targets) {
      std::vector<double> xs, ys;
      const std::size_t n = std::min(f.size(), y.size());
      for (std::size_t r = 0; r < n; ++r)
        if (f[r] && y[r]) {
          xs.push_back(*f[r]);
          ys.push_back(*y[r]);
        }
      total += stats::univariate_r2(xs, ys);
    }
    const double avg = total / static_cast<double>(targets.size());
    if (avg > best_r2) {
      best_r2 = avg;
      best_h = horizons[idx];
    }
  }
  return best_h;
}

MetaWeights meta_weights(const std::vector<std::string>& sources,
                         const std::vector<std::vector<double>>& source_cols,
                         const std::vector<double>& y) {
  if (sources.size() != source_cols.size())
    throw std::invalid_argument("source name/column count mismatch");
  MetaWeights out;
  out.sources = sources;
  std::vector<double> r2(sources.size());
  double max_r2 = 0.0;
  for (std::size_t j = 0; j < source_cols.size(); ++j) {
    r2[j] = stats::univariate_r2(source_cols[j], y);
    max_r2 = std::max(max_r2, r2[j]);
  }
  out.weights.resize(sources.size());
  if (max_r2 <= 0.0) {
    out.degenerate = true;
    std::fill(out.weights.begin(), out.weights.end(), 1.0);
  } else {
    for (std::size_t j = 0; j < r2.size(); ++j) out.weights[j] = r2[j] / max_r2;
  }
  return out;
}

std::vector<double> weighted_sum(
    const std::vector<std::vector<double>>& cols,
    const std::vector<double>& weights) {
  if (cols.size() != weights.size())
    throw std::invalid_argument("column/weight count mismatch");
  if (cols.empty()) return {};
  std::vector<double> out(cols[0].size(), 0.0);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].size() != out.size())
      throw std::invalid_argument("column length mismatch");
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] += weights[j] * cols[j][i];
  }
  return out;
}

std::string FitResult::to_json() const {
  json j;
  j["target"] = model.target;
  j["delta_ms"] = model.delta_ms;
  j["intercept"] = model.intercept;
  json coeffs = json::object();
  for (std::size_t i = 0; i < model.feature_names.size(); ++i)
    coeffs[model.feature_names[i]] = model.coefficients[i];
  j["coefficients"] = coeffs;
  json std_j = json::object();
  for (std::size_t i = 0; i < model.feature_names.size(); ++i)
    std_j[model.feature_names[i]] = {{"mean", model.means[i]},
                                     {"std", model.stds[i]}};
  j["standardizer"] = std_j;
  json d;
  d["r2_in_sample"] = diagnostics.r2_in_sample;
  if (diagnostics.r2_out_of_sample)
    d["r2_out_of_sample"] = *diagnostics.r2_out_of_sample;
  d["n_samples"] = diagnostics.n_samples;
  d["converged"] = diagnostics.converged;
  if (!diagnostics.converged) d["last_delta"] = diagnostics.last_delta;
  if (!diagnostics.t_stats.empty()) {
    json t = json::object(), pv = json::object();
    for (std::size_t i = 0; i < model.feature_names.size(); ++i) {
      t[model.feature_names[i]] = diagnostics.t_stats[i];
      pv[model.feature_names[i]] = diagnostics.p_values[i];
    }
    d["t_stats"] = t;
    d["p_values"] = pv;
  }
  j["diagnostics"] = d;
  return j.dump(2);
}

FitResult FitResult::from_json(const std::string& text) {
  const json j = json::parse(text);
  FitResult result;
  result.model.target = j.at("target").get<std::string>();
  result.model.delta_ms = j.at("delta_ms").get<std::int64_t>();
  result.model.intercept = j.at("intercept").get<double>();
  for (const auto& [name, value] : j.at("coefficients").items()) {
    result.model.feature_names.push_back(name);
    result.model.coefficients.push_back(value.get<double>());
  }
  const json& std_j = j.at("standardizer");
  for (const auto& name : result.model.feature_names) {
    result.model.means.push_back(std_j.at(name).at("mean").get<double>());
    result.model.stds.push_back(std_j.at(name).at("std").get<double>());
  }
  const json& d = j.at("diagnostics");
  result.diagnostics.r2_in_sample = d.at("r2_in_sample").get<double>();
  if (d.contains("r2_out_of_sample"))
    result.diagnostics.r2_out_of_sample =
        d.at("r2_out_of_sample").get<double>();
  result.diagnostics.n_samples = d.at("n_samples").get<std::size_t>();
  if (d.contains("converged"))
    result.diagnostics.converged = d.at("converged").get<bool>();
  if (d.contains("t_stats")) {
    for (const auto& name : result.model.feature_names) {
      result.diagnostics.t_stats.push_back(
          d.at("t_stats").at(name).get<double>());
      result.diagnostics.p_values.push_back(
          d.at("p_values").at(name).get<double>());
    }
  }
  return result;
}

}  // namespace crossflow
