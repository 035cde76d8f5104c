#include "mindsculpt/signal.hpp"

#include "mindsculpt/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace mindsculpt {

const char* shape_name(int class_id) {
  switch (class_id) {
    case 0: return "cube";
    case 1: return "pyramid";
    case 2: return "square_torus";
    case 3: return "union_cubes";
    default: return "unknown";
  }
}

EegRecording::EegRecording(SignalMatrix data, double fs, std::vector<std::string> channel_labels,
                           std::vector<Point3> channel_positions)
    : data_(std::move(data)),
      fs_(fs),
      labels_(std::move(channel_labels)),
      positions_(std::move(channel_positions)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw InvalidArgument("recording needs at least one channel and one sample");
  }
  if (!(fs_ > 0.0) || !std::isfinite(fs_)) {
    throw InvalidArgument("sampling rate must be positive");
  }
  if (labels_.size() != n_channels()) {
    throw InvalidArgument("channel label count " + std::to_string(labels_.size()) +
                          " does not match channel count " + std::to_string(n_channels()));
  }
  if (!positions_.empty() && positions_.size() != n_channels()) {
    throw InvalidArgument("channel position count does not match channel count");
  }
  if (!data_.allFinite()) {
    throw InvalidData("recording contains non-finite samples");
  }
}

EegRecording EegRecording::with_default_labels(SignalMatrix data, double fs) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(data.rows()));
  for (Eigen::Index c = 0; c < data.rows(); ++c) labels.push_back("Ch" + std::to_string(c + 1));
  return EegRecording(std::move(data), fs, std::move(labels));
}

EegRecording EegRecording::slice(std::size_t begin, std::size_t count) const {
  if (begin + count > n_samples() || count == 0) {
    throw InvalidArgument("slice [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                          ") outside recording of " + std::to_string(n_samples()) + " samples");
  }
  SignalMatrix part = data_.middleCols(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(count));
  return EegRecording(std::move(part), fs_, labels_, positions_);
}

EegRecording EegRecording::select_channels(std::span<const std::size_t> channels) const {
  SignalMatrix part(static_cast<Eigen::Index>(channels.size()), data_.cols());
  std::vector<std::string> labels;
  std::vector<Point3> positions;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i] >= n_channels()) throw InvalidArgument("channel index out of range");
    part.row(static_cast<Eigen::Index>(i)) = data_.row(static_cast<Eigen::Index>(channels[i]));
    labels.push_back(labels_[channels[i]]);
    if (!positions_.empty()) positions.push_back(positions_[channels[i]]);
  }
  return EegRecording(std::move(part), fs_, std::move(labels), std::move(positions));
}

EegRecording EegRecording::with_data(SignalMatrix data) const {
  if (static_cast<std::size_t>(data.rows()) != n_channels()) {
    throw InvalidArgument("replacement data has a different channel count");
  }
  return EegRecording(std::move(data), fs_, labels_, positions_);
}

void validate_markers(std::span<const TrialMarker> markers, std::size_t n_samples) {
  std::size_t previous_end = 0;
  for (std::size_t i = 0; i < markers.size(); ++i) {
    const auto& m = markers[i];
    if (m.class_id < 0 || m.class_id >= kNumShapeClasses) {
      throw InvalidArgument("marker " + std::to_string(i) + " has invalid class id " + std::to_string(m.class_id));
    }
    if (m.duration_samples == 0 || m.onset_sample + m.duration_samples > n_samples) {
      throw InvalidArgument("marker " + std::to_string(i) + " overruns the recording (" +
                            std::to_string(m.onset_sample + m.duration_samples) + " > " +
                            std::to_string(n_samples) + " samples)");
    }
    if (m.onset_sample < previous_end) {
      throw InvalidArgument("marker " + std::to_string(i) + " overlaps or precedes the previous marker");
    }
    previous_end = m.onset_sample + m.duration_samples;
  }
}

void validate_band(const BandDefinition& band, double fs) {
  if (!(band.low_hz > 0.0) || !(band.low_hz < band.high_hz) || !(band.high_hz < fs / 2.0)) {
    throw InvalidArgument("band '" + band.name + "' [" + std::to_string(band.low_hz) + ", " +
                          std::to_string(band.high_hz) + ") Hz is not inside (0, " + std::to_string(fs / 2.0) +
                          ") Hz");
  }
}

std::array<BandDefinition, 3> default_bands() {
  return {BandDefinition{"theta", 4.0, 7.0}, BandDefinition{"alpha", 7.0, 15.0}, BandDefinition{"beta", 15.0, 30.0}};
}

// ---------------------------------------------------------------------------

namespace {

enum class PassType { Low, High };

Biquad butterworth_section(PassType type, double fs, double cutoff_hz, double q) {
  const double k = std::tan(std::numbers::pi * cutoff_hz / fs);
  const double norm = 1.0 / (1.0 + k / q + k * k);
  Biquad s;
  if (type == PassType::Low) {
    s.b0 = k * k * norm;
    s.b1 = 2.0 * s.b0;
  } else {
    s.b0 = norm;
    s.b1 = -2.0 * s.b0;
  }
  s.b2 = s.b0;
  s.a1 = 2.0 * (k * k - 1.0) * norm;
  s.a2 = (1.0 - k / q + k * k) * norm;
  return s;
}

// state holds (z1, z2) per section.
inline double run_sections(const std::vector<Biquad>& sections, double* state, double x) {
  for (std::size_t s = 0; s < sections.size(); ++s) {
    const Biquad& q = sections[s];
    double& z1 = state[2 * s];
    double& z2 = state[2 * s + 1];
    const double y = q.b0 * x + z1;
    z1 = q.b1 * x - q.a1 * y + z2;
    z2 = q.b2 * x - q.a2 * y;
    x = y;
  }
  return x;
}

void steady_state(const std::vector<Biquad>& sections, double* state, double level) {
  double v = level;
  for (std::size_t s = 0; s < sections.size(); ++s) {
    const Biquad& q = sections[s];
    const double gain = (q.b0 + q.b1 + q.b2) / (1.0 + q.a1 + q.a2);
    const double y = gain * v;
    state[2 * s + 1] = q.b2 * v - q.a2 * y;
    state[2 * s] = q.b1 * v - q.a1 * y + state[2 * s + 1];
    v = y;
  }
}

void filter_in_place(const std::vector<Biquad>& sections, std::vector<double>& x) {
  std::vector<double> state(2 * sections.size(), 0.0);
  steady_state(sections, state.data(), x.front());
  for (double& v : x) v = run_sections(sections, state.data(), v);
}

}  // namespace

ButterworthBandpass::ButterworthBandpass(double fs, double low_hz, double high_hz)
    : fs_(fs), low_hz_(low_hz), high_hz_(high_hz) {
  validate_band(BandDefinition{"bandpass", low_hz, high_hz}, fs);
  // Pole-pair quality factors of a 4th-order Butterworth prototype.
  const double q_values[2] = {1.0 / (2.0 * std::cos(std::numbers::pi / 8.0)),
                              1.0 / (2.0 * std::cos(3.0 * std::numbers::pi / 8.0))};
  for (double q : q_values) sections_.push_back(butterworth_section(PassType::High, fs, low_hz, q));
  for (double q : q_values) sections_.push_back(butterworth_section(PassType::Low, fs, high_hz, q));
}

double ButterworthBandpass::magnitude(double freq_hz) const {
  const double w = 2.0 * std::numbers::pi * freq_hz / fs_;
  const std::complex<double> z1 = std::polar(1.0, -w);
  const std::complex<double> z2 = z1 * z1;
  std::complex<double> h{1.0, 0.0};
  for (const auto& s : sections_) {
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  return std::abs(h);
}

std::vector<double> filtfilt(const ButterworthBandpass& design, std::span<const double> x) {
  const std::size_t n = x.size();
  constexpr std::size_t kTotalOrder = 2 * ButterworthBandpass::kOrder;
  if (n <= 3 * kTotalOrder) {
    throw InvalidArgument("signal of " + std::to_string(n) + " samples is too short for zero-phase filtering");
  }
  const auto one_period = static_cast<std::size_t>(std::ceil(design.fs() / design.low_hz()));
  const std::size_t pad = std::min(n - 1, std::max(3 * kTotalOrder, one_period));

  std::vector<double> ext(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) ext[i] = 2.0 * x[0] - x[pad - i];
  std::copy(x.begin(), x.end(), ext.begin() + static_cast<std::ptrdiff_t>(pad));
  for (std::size_t i = 0; i < pad; ++i) ext[pad + n + i] = 2.0 * x[n - 1] - x[n - 2 - i];

  filter_in_place(design.sections(), ext);
  std::reverse(ext.begin(), ext.end());
  filter_in_place(design.sections(), ext);
  std::reverse(ext.begin(), ext.end());

  return {ext.begin() + static_cast<std::ptrdiff_t>(pad), ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

EegRecording bandpass_filter(const EegRecording& rec, double low_hz, double high_hz) {
  const ButterworthBandpass design(rec.fs(), low_hz, high_hz);
  SignalMatrix out(rec.data().rows(), rec.data().cols());
  for (std::size_t c = 0; c < rec.n_channels(); ++c) {
    const auto y = filtfilt(design, rec.channel(c));
    std::copy(y.begin(), y.end(), out.row(static_cast<Eigen::Index>(c)).data());
  }
  return rec.with_data(std::move(out));
}

CausalBandpass::CausalBandpass(std::size_t n_channels, double fs, double low_hz, double high_hz)
    : design_(fs, low_hz, high_hz), n_channels_(n_channels), state_(n_channels * 2 * design_.sections().size(), 0.0) {}

void CausalBandpass::process(SignalMatrix& block) {
  if (static_cast<std::size_t>(block.rows()) != n_channels_) {
    throw InvalidArgument("block channel count does not match the filter");
  }
  if (block.cols() == 0) return;
  const std::size_t stride = 2 * design_.sections().size();
  for (std::size_t c = 0; c < n_channels_; ++c) {
    double* st = state_.data() + c * stride;
    double* row = block.row(static_cast<Eigen::Index>(c)).data();
    if (!primed_) steady_state(design_.sections(), st, row[0]);
    for (Eigen::Index i = 0; i < block.cols(); ++i) row[i] = run_sections(design_.sections(), st, row[i]);
  }
  primed_ = true;
}

void CausalBandpass::reset() {
  std::fill(state_.begin(), state_.end(), 0.0);
  primed_ = false;
}

// ---------------------------------------------------------------------------

namespace {

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    m = 0.5 * (m + lower);
  }
  return m;
}

}  // namespace

std::vector<bool> detect_bad_channels(const EegRecording& rec, const BadChannelCriteria& criteria) {
  if (static_cast<double>(rec.n_samples()) < rec.fs()) {
    throw InvalidArgument("bad-channel detection needs at least one second of data");
  }
  const std::size_t n = rec.n_channels();
  // A channel's level is the median variance of its 1 s windows, so a few
  // blinks do not mark a well-attached channel as bad; ASR handles those.
  const auto second = static_cast<Eigen::Index>(std::floor(rec.fs()));
  const Eigen::Index n_windows = static_cast<Eigen::Index>(rec.n_samples()) / second;
  std::vector<double> variance(n);
  std::vector<double> per_window(static_cast<std::size_t>(n_windows));
  for (std::size_t c = 0; c < n; ++c) {
    const auto row = rec.data().row(static_cast<Eigen::Index>(c));
    for (Eigen::Index w = 0; w < n_windows; ++w) {
      const auto seg = row.segment(w * second, second);
      per_window[static_cast<std::size_t>(w)] = (seg.array() - seg.mean()).square().mean();
    }
    variance[c] = median_of(per_window);
  }

  std::vector<bool> bad(n, false);
  std::vector<double> log_var;
  std::vector<std::size_t> live;
  for (std::size_t c = 0; c < n; ++c) {
    if (variance[c] < criteria.flat_variance_uv2) {
      bad[c] = true;
    } else {
      live.push_back(c);
      log_var.push_back(std::log(variance[c]));
    }
  }
  if (n < criteria.min_channels_for_robust || live.size() < 2) return bad;

  const double med = median_of(log_var);
  std::vector<double> dev(log_var.size());
  for (std::size_t i = 0; i < log_var.size(); ++i) dev[i] = std::abs(log_var[i] - med);
  const double mad = median_of(dev);
  if (!(mad > 0.0)) return bad;
  const double scale = 1.4826 * mad;
  for (std::size_t i = 0; i < live.size(); ++i) {
    if (std::abs(log_var[i] - med) / scale > criteria.robust_z_limit) bad[live[i]] = true;
  }
  return bad;
}

// ---------------------------------------------------------------------------

std::vector<Epoch> extract_epochs(const EegRecording& rec, std::span<const TrialMarker> markers) {
  validate_markers(markers, rec.n_samples());
  std::vector<Epoch> epochs;
  epochs.reserve(markers.size());
  for (std::size_t i = 0; i < markers.size(); ++i) {
    epochs.push_back(Epoch{markers[i].class_id, i, rec.slice(markers[i].onset_sample, markers[i].duration_samples)});
  }
  return epochs;
}

}  // namespace mindsculpt
