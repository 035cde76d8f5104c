#pragma once

#include "mindsculpt/signal.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace mindsculpt {

struct WindowSpec {
  double window_s{2.0};
  double step_s{0.5};
};

struct SampleRange {
  std::size_t begin{0};
  std::size_t end{0};  // exclusive

  bool operator==(const SampleRange&) const = default;
};

struct FeatureColumn {
  std::size_t channel{0};
  std::size_t band{0};

  bool operator==(const FeatureColumn&) const = default;
};

// Windows as rows, band-power features as columns. Column index is
// channel * n_bands + band. Labels are class ids, or -1 when unlabeled.
struct FeatureMatrix {
  Eigen::MatrixXd values;
  std::vector<int> labels;
  std::vector<int> trial_ids;
  std::vector<FeatureColumn> columns;
  std::size_t n_bands{3};

  std::size_t n_rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t n_features() const { return static_cast<std::size_t>(values.cols()); }
  bool labeled() const;

  // Rows whose indices are listed, in order.
  FeatureMatrix take_rows(std::span<const std::size_t> rows) const;
};

std::size_t window_samples(const WindowSpec& spec, double fs);
std::size_t step_samples(const WindowSpec& spec, double fs);

// Ranges [k*step, k*step + window) fully inside an epoch of n_samples.
std::vector<SampleRange> sliding_windows(std::size_t n_samples, double fs, const WindowSpec& spec);
std::vector<SampleRange> sliding_windows(const EegRecording& epoch, const WindowSpec& spec);

// log10 of Hann-periodogram power in [low_hz, high_hz) per channel.
std::vector<double> band_power(const EegRecording& window, const BandDefinition& band);

// Same estimator for several bands of one channel from a single transform.
std::vector<double> channel_log_band_powers(std::span<const double> samples, double fs,
                                            std::span<const BandDefinition> bands);

// Linear (pre-log) band power, exposed for spectral checks.
std::vector<double> channel_linear_band_powers(std::span<const double> samples, double fs,
                                               std::span<const BandDefinition> bands);

// Feature vector of one multichannel window, channel-major over bands.
Eigen::VectorXd feature_row(const SignalMatrix& window, double fs, std::span<const BandDefinition> bands);

struct FeatureBuildOptions {
  std::size_t n_channels_hint{128};  // column count when there are no epochs
  // Windows with any |sample| above this are dropped.
  double amplitude_guard_uv{std::numeric_limits<double>::infinity()};
};

FeatureMatrix build_feature_matrix(std::span<const Epoch> epochs, const WindowSpec& spec,
                                   std::span<const BandDefinition> bands, const FeatureBuildOptions& options = {});

}  // namespace mindsculpt
