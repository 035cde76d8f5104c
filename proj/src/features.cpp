#include "mindsculpt/features.hpp"

#include "mindsculpt/error.hpp"
#include "mindsculpt/fft.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mindsculpt {

namespace {

constexpr double kPowerFloor = 1e-12;

void check_bands(std::span<const BandDefinition> bands, double fs, std::size_t n) {
  for (const auto& band : bands) {
    validate_band(band, fs);
    if (static_cast<double>(n) < 2.0 * fs / band.low_hz) {
      throw InvalidArgument("window of " + std::to_string(n) + " samples spans fewer than two cycles of " +
                            std::to_string(band.low_hz) + " Hz");
    }
  }
}

}  // namespace

bool FeatureMatrix::labeled() const {
  if (labels.size() != n_rows() || labels.empty()) return false;
  for (int l : labels) {
    if (l < 0) return false;
  }
  return true;
}

FeatureMatrix FeatureMatrix::take_rows(std::span<const std::size_t> rows) const {
  FeatureMatrix out;
  out.columns = columns;
  out.n_bands = n_bands;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), values.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.values.row(static_cast<Eigen::Index>(i)) = values.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(labels[rows[i]]);
    out.trial_ids.push_back(trial_ids[rows[i]]);
  }
  return out;
}

std::size_t window_samples(const WindowSpec& spec, double fs) {
  return static_cast<std::size_t>(std::lround(spec.window_s * fs));
}

std::size_t step_samples(const WindowSpec& spec, double fs) {
  return static_cast<std::size_t>(std::lround(spec.step_s * fs));
}

std::vector<SampleRange> sliding_windows(std::size_t n_samples, double fs, const WindowSpec& spec) {
  if (!(spec.step_s > 0.0) || spec.step_s > spec.window_s) {
    throw InvalidArgument("window step must satisfy 0 < step <= window");
  }
  const std::size_t window = window_samples(spec, fs);
  const std::size_t step = step_samples(spec, fs);
  if (step == 0 || window == 0) throw InvalidArgument("window spec rounds to zero samples");
  std::vector<SampleRange> ranges;
  for (std::size_t begin = 0; begin + window <= n_samples; begin += step) ranges.push_back({begin, begin + window});
  return ranges;
}

std::vector<SampleRange> sliding_windows(const EegRecording& epoch, const WindowSpec& spec) {
  return sliding_windows(epoch.n_samples(), epoch.fs(), spec);
}

std::vector<double> channel_linear_band_powers(std::span<const double> samples, double fs,
                                               std::span<const BandDefinition> bands) {
  const std::size_t n = samples.size();
  check_bands(bands, fs, n);

  std::vector<double> tapered(n);
  double window_energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // Periodic Hann: exact nulls two or more bins away from an on-bin tone.
    const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n)));
    tapered[i] = samples[i] * w;
    window_energy += w * w;
  }
  const auto spectrum = rfft(tapered);
  // Normalizing by N * sum(w^2) makes the band sum a mean-square power.
  const double norm = 1.0 / (static_cast<double>(n) * window_energy);
  const double bin_hz = fs / static_cast<double>(n);

  std::vector<double> power(bands.size(), 0.0);
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double f = static_cast<double>(k) * bin_hz;
    const bool edge_bin = k == 0 || (n % 2 == 0 && k == n / 2);
    const double p = (edge_bin ? 1.0 : 2.0) * std::norm(spectrum[k]) * norm;
    for (std::size_t b = 0; b < bands.size(); ++b) {
      if (f >= bands[b].low_hz && f < bands[b].high_hz) power[b] += p;
    }
  }
  return power;
}

std::vector<double> channel_log_band_powers(std::span<const double> samples, double fs,
                                            std::span<const BandDefinition> bands) {
  auto power = channel_linear_band_powers(samples, fs, bands);
  for (double& p : power) p = std::log10(p + kPowerFloor);
  return power;
}

std::vector<double> band_power(const EegRecording& window, const BandDefinition& band) {
  std::vector<double> out(window.n_channels());
  const BandDefinition one[1] = {band};
  for (std::size_t c = 0; c < window.n_channels(); ++c) {
    out[c] = channel_log_band_powers(window.channel(c), window.fs(), one)[0];
  }
  return out;
}

Eigen::VectorXd feature_row(const SignalMatrix& window, double fs, std::span<const BandDefinition> bands) {
  const auto n_bands = static_cast<Eigen::Index>(bands.size());
  Eigen::VectorXd row(window.rows() * n_bands);
  for (Eigen::Index c = 0; c < window.rows(); ++c) {
    const std::span<const double> samples(window.row(c).data(), static_cast<std::size_t>(window.cols()));
    const auto p = channel_log_band_powers(samples, fs, bands);
    for (Eigen::Index b = 0; b < n_bands; ++b) row[c * n_bands + b] = p[static_cast<std::size_t>(b)];
  }
  return row;
}

FeatureMatrix build_feature_matrix(std::span<const Epoch> epochs, const WindowSpec& spec,
                                   std::span<const BandDefinition> bands, const FeatureBuildOptions& options) {
  const std::size_t n_channels = epochs.empty() ? options.n_channels_hint : epochs.front().signal.n_channels();
  const double fs = epochs.empty() ? 0.0 : epochs.front().signal.fs();
  for (std::size_t e = 0; e < epochs.size(); ++e) {
    if (epochs[e].signal.n_channels() != n_channels) {
      throw InvalidArgument("epoch " + std::to_string(e) + " has " + std::to_string(epochs[e].signal.n_channels()) +
                            " channels, expected " + std::to_string(n_channels));
    }
    if (epochs[e].signal.fs() != fs) throw InvalidArgument("epoch " + std::to_string(e) + " has a different fs");
  }

  FeatureMatrix fm;
  fm.n_bands = bands.size();
  for (std::size_t c = 0; c < n_channels; ++c) {
    for (std::size_t b = 0; b < bands.size(); ++b) fm.columns.push_back({c, b});
  }

  std::vector<Eigen::VectorXd> rows;
  for (const auto& epoch : epochs) {
    const SignalMatrix& data = epoch.signal.data();
    for (const auto& range : sliding_windows(epoch.signal, spec)) {
      const auto begin = static_cast<Eigen::Index>(range.begin);
      const auto len = static_cast<Eigen::Index>(range.end - range.begin);
      const SignalMatrix window = data.middleCols(begin, len);
      if (window.cwiseAbs().maxCoeff() > options.amplitude_guard_uv) continue;
      rows.push_back(feature_row(window, fs, bands));
      fm.labels.push_back(epoch.class_id);
      fm.trial_ids.push_back(static_cast<int>(epoch.trial_index));
    }
  }
  fm.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n_channels * bands.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) fm.values.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  return fm;
}

}  // namespace mindsculpt
