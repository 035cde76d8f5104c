#include "mindsculpt/error.hpp"
#include "mindsculpt/signal.hpp"

#include <spdlog/spdlog.h>

#include <cmath>

namespace mindsculpt {

std::vector<std::size_t> asr_window_starts(std::size_t n_samples, std::size_t window_samples) {
  std::vector<std::size_t> starts;
  if (window_samples == 0 || n_samples < window_samples) return starts;
  const std::size_t hop = window_samples / 2;
  for (std::size_t s = 0; s + window_samples <= n_samples; s += hop) starts.push_back(s);
  if (starts.back() + window_samples < n_samples) starts.push_back(n_samples - window_samples);
  return starts;
}

namespace {

Eigen::VectorXd row_rms(const Eigen::MatrixXd& y) {
  return (y.array().square().rowwise().sum() / static_cast<double>(y.cols())).sqrt();
}

}  // namespace

AsrCalibration asr_calibrate(const EegRecording& rec, double sd_threshold, double window_s) {
  if (!(sd_threshold > 0.0)) throw InvalidArgument("ASR sd threshold must be positive");
  if (rec.duration_s() < 10.0) throw InvalidArgument("ASR calibration needs at least 10 s of data");

  AsrCalibration cal;
  auto window = static_cast<std::size_t>(std::lround(window_s * rec.fs()));
  window += window % 2;
  if (window < 2) throw InvalidArgument("ASR window is shorter than two samples");
  cal.window_samples = window;

  // Input is bandpassed, so second moments about zero are the covariance.
  const Eigen::MatrixXd x = rec.data();
  Eigen::MatrixXd cov = (x * x.transpose()) / static_cast<double>(x.cols());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const double trace = cov.trace();
  if (eig.eigenvalues().minCoeff() <= 1e-12 * std::max(trace, 1e-300)) {
    spdlog::warn("ASR calibration covariance is rank deficient; regularizing by 1e-9 x trace");
    cov.diagonal().array() += 1e-9 * trace;
    eig.compute(cov);
    cal.regularized = true;
  }
  // Descending variance order.
  cal.mixing = eig.eigenvectors().rowwise().reverse();

  const auto starts = asr_window_starts(rec.n_samples(), window);
  const auto n = static_cast<Eigen::Index>(rec.n_channels());
  Eigen::MatrixXd rms(static_cast<Eigen::Index>(starts.size()), n);
  for (std::size_t w = 0; w < starts.size(); ++w) {
    const Eigen::MatrixXd y =
        cal.mixing.transpose() * x.middleCols(static_cast<Eigen::Index>(starts[w]), static_cast<Eigen::Index>(window));
    rms.row(static_cast<Eigen::Index>(w)) = row_rms(y).transpose();
  }
  const Eigen::RowVectorXd mean = rms.colwise().mean();
  const Eigen::RowVectorXd std_dev = ((rms.rowwise() - mean).array().square().colwise().mean()).sqrt();
  cal.component_thresholds = (mean + sd_threshold * std_dev).transpose().cwiseMax(1e-12);
  return cal;
}

Eigen::MatrixXd asr_component_rms(const EegRecording& rec, const AsrCalibration& cal) {
  if (static_cast<Eigen::Index>(rec.n_channels()) != cal.mixing.rows()) {
    throw InvalidArgument("recording channel count does not match the ASR calibration");
  }
  const Eigen::MatrixXd x = rec.data();
  const auto starts = asr_window_starts(rec.n_samples(), cal.window_samples);
  Eigen::MatrixXd rms(static_cast<Eigen::Index>(starts.size()), cal.mixing.cols());
  for (std::size_t w = 0; w < starts.size(); ++w) {
    const Eigen::MatrixXd y = cal.mixing.transpose() * x.middleCols(static_cast<Eigen::Index>(starts[w]),
                                                                     static_cast<Eigen::Index>(cal.window_samples));
    rms.row(static_cast<Eigen::Index>(w)) = row_rms(y).transpose();
  }
  return rms;
}

EegRecording asr_clean(const EegRecording& rec, const AsrCalibration& cal, AsrStats* stats) {
  if (static_cast<Eigen::Index>(rec.n_channels()) != cal.mixing.rows()) {
    throw InvalidArgument("recording has " + std::to_string(rec.n_channels()) +
                          " channels but the ASR calibration expects " + std::to_string(cal.mixing.rows()));
  }
  const std::size_t window = cal.window_samples;
  if (rec.n_samples() < window) return rec;

  const Eigen::MatrixXd x = rec.data();
  const auto w_len = static_cast<Eigen::Index>(window);
  // Triangular weights summing to one at 50% overlap.
  Eigen::RowVectorXd weight(w_len);
  const double half = static_cast<double>(window) / 2.0;
  for (Eigen::Index i = 0; i < w_len; ++i) weight[i] = 1.0 - std::abs((static_cast<double>(i) + 0.5) - half) / half;

  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(x.rows(), x.cols());
  Eigen::RowVectorXd weight_sum = Eigen::RowVectorXd::Zero(x.cols());
  AsrStats local;
  for (std::size_t start : asr_window_starts(rec.n_samples(), window)) {
    const auto s = static_cast<Eigen::Index>(start);
    const auto segment = x.middleCols(s, w_len);
    Eigen::MatrixXd y = cal.mixing.transpose() * segment;
    const Eigen::VectorXd rms = row_rms(y);
    std::size_t zeroed = 0;
    for (Eigen::Index c = 0; c < y.rows(); ++c) {
      if (rms[c] > cal.component_thresholds[c]) {
        y.row(c).setZero();
        ++zeroed;
      }
    }
    ++local.windows;
    if (zeroed > 0) {
      ++local.windows_modified;
      local.components_zeroed += zeroed;
      acc.middleCols(s, w_len).array() += (cal.mixing * y).array().rowwise() * weight.array();
    } else {
      acc.middleCols(s, w_len).array() += segment.array().rowwise() * weight.array();
    }
    weight_sum.segment(s, w_len) += weight;
  }
  acc.array().rowwise() /= weight_sum.array();
  if (stats) *stats = local;
  return rec.with_data(SignalMatrix(acc));
}

}  // namespace mindsculpt
