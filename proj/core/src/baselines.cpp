#include "parkcast/baselines.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "parkcast/errors.hpp"

namespace parkcast {

namespace {

std::pair<int, int> slot_of(Timestamp t, std::int64_t step) {
  const CivilTime c = civil_from_timestamp(t);
  const std::int64_t sod = static_cast<std::int64_t>(c.hour) * 3600 +
                           static_cast<std::int64_t>(c.minute) * 60 + c.second;
  return {c.weekday, static_cast<int>(sod / step)};
}

}  // namespace

HAModel ha_fit(const std::vector<std::pair<Timestamp, double>>& train,
               std::int64_t step) {
  if (train.empty()) throw DataError("ha_fit: empty training set");
  HAModel model;
  model.step = step;

  // Sorted accumulation keeps the means independent of input order.
  std::vector<std::pair<Timestamp, double>> rows = train;
  std::sort(rows.begin(), rows.end());

  std::map<std::pair<int, int>, double> sums;
  double global_sum = 0.0;
  for (const auto& [t, v] : rows) {
    const auto key = slot_of(t, step);
    sums[key] += v;
    model.slot_counts[key] += 1;
    global_sum += v;
  }
  for (const auto& [key, sum] : sums)
    model.slot_means[key] = sum / static_cast<double>(model.slot_counts[key]);
  model.global_mean = global_sum / static_cast<double>(rows.size());
  return model;
}

std::vector<double> ha_predict(const HAModel& model,
                               const std::vector<Timestamp>& when) {
  std::vector<double> out;
  out.reserve(when.size());
  for (Timestamp t : when) {
    const auto key = slot_of(t, model.step);
    auto it = model.slot_means.find(key);
    out.push_back(it != model.slot_means.end() ? it->second : model.global_mean);
  }
  return out;
}

NLinearModel nlinear_fit(const std::vector<WindowSample>& samples,
                         std::size_t horizon) {
  if (samples.empty()) throw DataError("nlinear_fit: no samples");
  const std::size_t L = samples.front().window;
  NLinearModel model;
  model.window = L;
  model.horizon = horizon;

  // Normal equations on [anchored window, 1] -> anchored target.
  const std::size_t dim = L + 1;
  Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd aty = Eigen::MatrixXd::Zero(dim, horizon);
  Eigen::VectorXd row(dim);
  for (const auto& s : samples) {
    if (s.window != L) throw DataError("nlinear_fit: inconsistent window lengths");
    if (s.target.size() != horizon)
      throw DataError("nlinear_fit: inconsistent horizons");
    const double anchor = s.at(L - 1, 0);
    for (std::size_t i = 0; i < L; ++i) row(i) = s.at(i, 0) - anchor;
    row(L) = 1.0;
    ata.selfadjointView<Eigen::Lower>().rankUpdate(row);
    for (std::size_t h = 0; h < horizon; ++h)
      aty.col(h) += row * (s.target[h] - anchor);
  }
  ata = ata.selfadjointView<Eigen::Lower>();
  // Smooth windows make neighboring columns nearly collinear; a ridge
  // proportional to the mean diagonal keeps the solve stable without
  // measurably biasing well-posed fits.
  const double mean_diag = ata.trace() / static_cast<double>(dim);
  ata.diagonal().array() += 1e-4 * mean_diag + 1e-12;
  Eigen::MatrixXd solution = ata.ldlt().solve(aty);

  model.weight.resize(L * horizon);
  model.bias.resize(horizon);
  for (std::size_t h = 0; h < horizon; ++h) {
    for (std::size_t i = 0; i < L; ++i) model.weight[i * horizon + h] = solution(i, h);
    model.bias[h] = solution(L, h);
  }
  return model;
}

std::vector<double> nlinear_predict(const NLinearModel& model,
                                    const std::vector<double>& window) {
  if (window.size() != model.window)
    throw ConfigError("nlinear_predict: window length mismatch");
  const std::size_t L = model.window, H = model.horizon;
  const double anchor = window[L - 1];
  std::vector<double> out(H);
  for (std::size_t h = 0; h < H; ++h) {
    double acc = 0.0;
    for (std::size_t i = 0; i < L; ++i)
      acc += (window[i] - anchor) * model.weight[i * H + h];
    out[h] = acc + model.bias[h] + anchor;
  }
  return out;
}

namespace {

std::vector<double> difference(const std::vector<double>& x) {
  std::vector<double> out;
  out.reserve(x.size() > 0 ? x.size() - 1 : 0);
  for (std::size_t i = 1; i < x.size(); ++i) out.push_back(x[i] - x[i - 1]);
  return out;
}

}  // namespace

ARModel ar_fit(const std::vector<std::vector<double>>& series, int p, int d) {
  if (p < 1) throw ConfigError("ar_fit: order p must be >= 1");
  if (d < 0 || d > 2) throw ConfigError("ar_fit: differencing d must be 0, 1, or 2");

  ARModel model;
  model.p = p;
  model.d = d;

  const std::size_t dim = static_cast<std::size_t>(p) + 1;
  Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd aty = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd row(dim);
  std::size_t n_rows = 0;
  for (const auto& raw : series) {
    if (raw.size() <= static_cast<std::size_t>(p + d + 1)) continue;
    std::vector<double> x = raw;
    for (int k = 0; k < d; ++k) x = difference(x);
    for (std::size_t t = static_cast<std::size_t>(p); t < x.size(); ++t) {
      for (int j = 0; j < p; ++j) row(j) = x[t - 1 - j];
      row(p) = 1.0;
      ata.selfadjointView<Eigen::Lower>().rankUpdate(row);
      aty += row * x[t];
      ++n_rows;
    }
  }
  if (n_rows == 0)
    throw DataError("ar_fit: series too short for p=" + std::to_string(p) +
                    ", d=" + std::to_string(d));
  ata = ata.selfadjointView<Eigen::Lower>();

  Eigen::LDLT<Eigen::MatrixXd> ldlt(ata);
  Eigen::VectorXd sol;
  // LDLT happily "solves" consistent singular systems, so singularity is
  // detected from the pivots rather than from info().
  const Eigen::VectorXd pivots = ldlt.vectorD().cwiseAbs();
  bool ok = ldlt.info() == Eigen::Success &&
            pivots.minCoeff() > 1e-12 * std::max(1.0, pivots.maxCoeff());
  if (ok) {
    sol = ldlt.solve(aty);
    ok = ((ata * sol - aty).norm() <= 1e-6 * std::max(1.0, aty.norm()));
  }
  if (!ok) {
    Eigen::MatrixXd ridged = ata;
    ridged.diagonal().array() += 1e-8;
    sol = ridged.ldlt().solve(aty);
    model.ridge_fallback = true;
  }

  model.coefficients.assign(sol.data(), sol.data() + p);
  model.intercept = sol(p);
  return model;
}

ARModel ar_fit(const std::vector<double>& series, int p, int d) {
  return ar_fit(std::vector<std::vector<double>>{series}, p, d);
}

std::vector<double> ar_predict(const ARModel& model,
                               const std::vector<double>& history,
                               std::size_t horizon) {
  const int p = model.p, d = model.d;
  if (history.size() <= static_cast<std::size_t>(p + d))
    throw DataError("ar_predict: history shorter than p + d");

  // Difference d times, keeping the tails needed to integrate back.
  std::vector<std::vector<double>> levels;  // levels[k] = k-times differenced
  levels.push_back(history);
  for (int k = 0; k < d; ++k) levels.push_back(difference(levels.back()));

  std::vector<double> work = levels.back();
  std::vector<double> diffed_forecast(horizon);
  for (std::size_t h = 0; h < horizon; ++h) {
    double v = model.intercept;
    for (int j = 0; j < p; ++j) v += model.coefficients[j] * work[work.size() - 1 - j];
    work.push_back(v);
    diffed_forecast[h] = v;
  }

  // Integrate back d times from the last observed levels.
  std::vector<double> forecast = std::move(diffed_forecast);
  for (int k = d - 1; k >= 0; --k) {
    double last = levels[k].back();
    for (std::size_t h = 0; h < horizon; ++h) {
      last += forecast[h];
      forecast[h] = last;
    }
  }
  return forecast;
}

}  // namespace parkcast
