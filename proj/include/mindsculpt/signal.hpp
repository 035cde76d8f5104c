#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mindsculpt {

// Channels are rows, samples are columns. Row-major so each channel is contiguous.
using SignalMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Point3 {
  double x{0.0};
  double y{0.0};
  double z{0.0};
};

enum class ShapeClass : int { Cube = 0, Pyramid = 1, SquareTorus = 2, UnionCubes = 3 };
inline constexpr int kNumShapeClasses = 4;

const char* shape_name(int class_id);

// Multichannel EEG in microvolts. Construction validates shape and finiteness.
class EegRecording {
 public:
  EegRecording(SignalMatrix data, double fs, std::vector<std::string> channel_labels,
               std::vector<Point3> channel_positions = {});

  // Channels labelled "Ch1".."ChN".
  static EegRecording with_default_labels(SignalMatrix data, double fs);

  const SignalMatrix& data() const { return data_; }
  double fs() const { return fs_; }
  const std::vector<std::string>& channel_labels() const { return labels_; }
  const std::vector<Point3>& channel_positions() const { return positions_; }
  std::size_t n_channels() const { return static_cast<std::size_t>(data_.rows()); }
  std::size_t n_samples() const { return static_cast<std::size_t>(data_.cols()); }
  double duration_s() const { return static_cast<double>(n_samples()) / fs_; }

  std::span<const double> channel(std::size_t c) const {
    return {data_.row(static_cast<Eigen::Index>(c)).data(), n_samples()};
  }

  // Copy of samples [begin, begin + count).
  EegRecording slice(std::size_t begin, std::size_t count) const;
  // Copy restricted to the given channel indices, in the given order.
  EegRecording select_channels(std::span<const std::size_t> channels) const;
  // Same metadata, new samples. Shape must match in channel count.
  EegRecording with_data(SignalMatrix data) const;

 private:
  SignalMatrix data_;
  double fs_;
  std::vector<std::string> labels_;
  std::vector<Point3> positions_;
};

struct TrialMarker {
  int class_id{0};
  std::size_t onset_sample{0};
  std::size_t duration_samples{0};

  bool operator==(const TrialMarker&) const = default;
};

// Throws InvalidArgument naming the first offending marker index.
void validate_markers(std::span<const TrialMarker> markers, std::size_t n_samples);

struct BandDefinition {
  std::string name;
  double low_hz{0.0};
  double high_hz{0.0};
};

// Throws InvalidArgument unless 0 < low < high < fs/2.
void validate_band(const BandDefinition& band, double fs);

std::array<BandDefinition, 3> default_bands();  // theta, alpha, beta

// ---------------------------------------------------------------------------
// Bandpass filtering: 4th-order Butterworth high-pass at low_hz cascaded with a
// 4th-order Butterworth low-pass at high_hz, realized as four biquads.

struct Biquad {
  double b0{1.0}, b1{0.0}, b2{0.0};
  double a1{0.0}, a2{0.0};
};

class ButterworthBandpass {
 public:
  static constexpr int kOrder = 4;

  ButterworthBandpass(double fs, double low_hz, double high_hz);

  const std::vector<Biquad>& sections() const { return sections_; }
  double fs() const { return fs_; }
  double low_hz() const { return low_hz_; }
  double high_hz() const { return high_hz_; }
  // Magnitude of the causal response evaluated from the section coefficients.
  double magnitude(double freq_hz) const;

 private:
  double fs_;
  double low_hz_;
  double high_hz_;
  std::vector<Biquad> sections_;
};

// Zero-phase (forward-backward) offline filtering with odd-reflection padding
// and steady-state initial conditions. Input is not modified.
EegRecording bandpass_filter(const EegRecording& rec, double low_hz, double high_hz);

// Single-channel zero-phase filtering through an existing design.
std::vector<double> filtfilt(const ButterworthBandpass& design, std::span<const double> x);

// Causal streaming filter with persisted state per channel.
class CausalBandpass {
 public:
  CausalBandpass(std::size_t n_channels, double fs, double low_hz, double high_hz);

  // Filters a channels x samples block in place. The first call initialises
  // the state to the steady-state response of each channel's first sample.
  void process(SignalMatrix& block);
  void reset();

 private:
  ButterworthBandpass design_;
  std::size_t n_channels_;
  // Two transposed-direct-form-II state words per section per channel.
  std::vector<double> state_;
  bool primed_{false};
};

// ---------------------------------------------------------------------------

struct BadChannelCriteria {
  double flat_variance_uv2{1e-10};
  double robust_z_limit{5.0};
  std::size_t min_channels_for_robust{8};
};

// Flags channels whose median 1 s window variance is flat or a robust-z
// outlier (log scale, median/MAD across channels).
std::vector<bool> detect_bad_channels(const EegRecording& rec, const BadChannelCriteria& criteria = {});

// ---------------------------------------------------------------------------
// Simplified artifact subspace reconstruction: a single principal-axis basis
// from calibration data, per-component RMS thresholds, and component zeroing
// over 50%-overlapping windows.

struct AsrCalibration {
  Eigen::MatrixXd mixing;                 // columns are orthonormal principal axes
  Eigen::VectorXd component_thresholds;   // RMS cutoff per axis
  std::size_t window_samples{0};
  bool regularized{false};
};

AsrCalibration asr_calibrate(const EegRecording& rec, double sd_threshold = 15.0, double window_s = 0.5);

struct AsrStats {
  std::size_t windows{0};
  std::size_t windows_modified{0};
  std::size_t components_zeroed{0};
};

EegRecording asr_clean(const EegRecording& rec, const AsrCalibration& cal, AsrStats* stats = nullptr);

// Per-window, per-component RMS on the calibration axes using the same
// half-overlapping window grid as asr_clean. Rows are windows.
Eigen::MatrixXd asr_component_rms(const EegRecording& rec, const AsrCalibration& cal);

// Start samples of the half-overlapping window grid used by ASR.
std::vector<std::size_t> asr_window_starts(std::size_t n_samples, std::size_t window_samples);

// ---------------------------------------------------------------------------

struct Epoch {
  int class_id{0};
  std::size_t trial_index{0};
  EegRecording signal;
};

std::vector<Epoch> extract_epochs(const EegRecording& rec, std::span<const TrialMarker> markers);

}  // namespace mindsculpt
