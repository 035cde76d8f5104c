#include "mindsculpt/synth.hpp"

#include "mindsculpt/error.hpp"
#include "mindsculpt/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace mindsculpt {

namespace {

constexpr double kBackgroundRmsUv = 10.0;
constexpr double kNoiseCornerHz = 1.0;
constexpr double kArtifactDurationS = 0.3;
constexpr double kArtifactRmsMultiple = 50.0;

constexpr std::size_t kAlphaPerRegion = 3;
constexpr std::size_t kAlphaComplex = 6;
constexpr std::size_t kThetaPerClass = 6;

// Chosen with tools/calibrate_snr so that two-class LOTO accuracy of the
// offline pipeline sits near 0.8 at snr = 1 and flattens beyond ~16 features.
constexpr double kDefaultTrialJitter = 0.04;
constexpr double kDefaultDisengagedFraction = 0.2;

// Independent stream per (purpose, seed, index).
std::mt19937_64 make_rng(std::uint64_t purpose, std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

enum Purpose : std::uint64_t { kNoise = 1, kOrder = 2, kArtifacts = 3, kJitter = 4, kEngagement = 5 };

// Takes up to `count` unused channels from `pool`, starting at `offset` and
// stepping by `stride`; marks them used.
std::vector<std::size_t> take(const std::vector<std::size_t>& pool, std::set<std::size_t>& used, std::size_t count,
                              std::size_t offset, std::size_t stride) {
  std::vector<std::size_t> out;
  for (std::size_t i = offset; i < pool.size() && out.size() < count; i += stride) {
    if (!used.contains(pool[i])) {
      out.push_back(pool[i]);
      used.insert(pool[i]);
    }
  }
  return out;
}

std::vector<std::size_t> concat(std::vector<std::size_t> a, const std::vector<std::size_t>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

std::map<int, std::vector<RegionGain>> default_region_map(double snr, std::size_t n_channels) {
  if (snr < 0.0) throw InvalidArgument("snr must be non-negative");
  const double boost = 1.0 + 0.5 * snr;
  const double suppress = 1.0 / boost;
  const BandDefinition alpha{"alpha", 8.0, 12.0};
  const BandDefinition theta{"theta", 4.0, 7.0};

  const auto frontal = region_channels(ScalpRegion::Frontal, n_channels);
  const auto posterior = region_channels(ScalpRegion::Posterior, n_channels);
  const auto parietal = region_channels(ScalpRegion::Parietal, n_channels);
  const auto central = region_channels(ScalpRegion::Central, n_channels);

  std::set<std::size_t> used;
  std::map<int, std::vector<RegionGain>> map;
  // Cube and pyramid interleave over the same frontal and posterior regions.
  const auto cube_alpha = concat(take(frontal, used, kAlphaPerRegion, 0, 2), take(posterior, used, kAlphaPerRegion, 0, 2));
  const auto pyr_alpha = concat(take(frontal, used, kAlphaPerRegion, 1, 2), take(posterior, used, kAlphaPerRegion, 1, 2));
  const auto torus_alpha = take(parietal, used, kAlphaComplex, 0, 1);
  const auto union_alpha = take(central, used, kAlphaComplex, 0, 1);

  std::vector<std::size_t> theta_pool = concat(concat(central, frontal), parietal);
  const double theta_gain[kNumShapeClasses] = {boost, suppress, boost, suppress};
  std::vector<std::size_t> theta_sets[kNumShapeClasses];
  for (int c = 0; c < kNumShapeClasses; ++c) theta_sets[c] = take(theta_pool, used, kThetaPerClass, 0, 1);

  map[0] = {RegionGain{cube_alpha, alpha, boost}, RegionGain{theta_sets[0], theta, theta_gain[0]}};
  map[1] = {RegionGain{pyr_alpha, alpha, boost}, RegionGain{theta_sets[1], theta, theta_gain[1]}};
  map[2] = {RegionGain{torus_alpha, alpha, suppress}, RegionGain{theta_sets[2], theta, theta_gain[2]}};
  map[3] = {RegionGain{union_alpha, alpha, suppress}, RegionGain{theta_sets[3], theta, theta_gain[3]}};
  return map;
}

SubjectProfile default_profile(std::uint64_t seed, double snr, std::size_t n_channels, double fs) {
  SubjectProfile p;
  p.seed = seed;
  p.snr = snr;
  p.n_channels = n_channels;
  p.fs = fs;
  p.region_map = default_region_map(snr, n_channels);
  p.trial_jitter = kDefaultTrialJitter;
  p.disengaged_fraction = kDefaultDisengagedFraction;
  return p;
}

// ---------------------------------------------------------------------------

EegRecording generate_noise(std::size_t channels, std::size_t samples, double fs, double slope, std::uint64_t seed) {
  if (static_cast<double>(samples) < fs) throw InvalidArgument("noise generation needs at least one second");
  if (channels == 0) throw InvalidArgument("noise generation needs at least one channel");
  SignalMatrix data(static_cast<Eigen::Index>(channels), static_cast<Eigen::Index>(samples));
  const double exponent = -std::abs(slope) / 2.0;  // amplitude ~ f^(-|slope|/2)
  const double bin_hz = fs / static_cast<double>(samples);
  // The spectrum is flat below kNoiseCornerHz. Otherwise the RMS normalization
  // would be dominated by the lowest bins and band levels would depend on the
  // recording length, so 30 s live segments would not match a long session.
  for (std::size_t c = 0; c < channels; ++c) {
    auto rng = make_rng(kNoise, seed, c);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> white(samples);
    for (double& v : white) v = normal(rng);
    auto spectrum = rfft(white);
    spectrum[0] = 0.0;
    for (std::size_t k = 1; k < spectrum.size(); ++k) spectrum[k] *= std::pow(std::max(static_cast<double>(k) * bin_hz, kNoiseCornerHz), exponent);
    auto shaped = irfft(spectrum, samples);
    double ms = 0.0;
    for (double v : shaped) ms += v * v;
    const double scale = kBackgroundRmsUv / std::sqrt(ms / static_cast<double>(samples));
    double* row = data.row(static_cast<Eigen::Index>(c)).data();
    for (std::size_t i = 0; i < samples; ++i) row[i] = shaped[i] * scale;
  }
  std::vector<std::string> labels;
  std::vector<Point3> positions;
  if (channels <= default_layout().size()) {
    labels = default_labels(channels);
    positions = default_positions(channels);
  } else {
    for (std::size_t c = 0; c < channels; ++c) labels.push_back("Ch" + std::to_string(c + 1));
  }
  return EegRecording(std::move(data), fs, std::move(labels), std::move(positions));
}

std::vector<std::pair<std::size_t, std::vector<double>>> class_signature_delta(const EegRecording& rec, int class_id,
                                                                               const SubjectProfile& profile,
                                                                               double engagement) {
  if (!(engagement >= 0.0)) throw InvalidArgument("engagement must be non-negative");
  const auto it = profile.region_map.find(class_id);
  if (it == profile.region_map.end()) {
    throw InvalidArgument("class " + std::to_string(class_id) + " has no signature in the subject profile");
  }
  std::map<std::size_t, std::vector<double>> deltas;
  for (const auto& entry : it->second) {
    if (!(entry.gain > 0.0)) throw InvalidArgument("signature gains must be positive");
    const double gain = std::pow(entry.gain, engagement);
    if (gain == 1.0) continue;
    const ButterworthBandpass design(rec.fs(), entry.band.low_hz, entry.band.high_hz);
    for (std::size_t ch : entry.channels) {
      if (ch >= rec.n_channels()) throw InvalidArgument("signature channel outside the recording");
      const auto component = filtfilt(design, rec.channel(ch));
      auto& d = deltas[ch];
      if (d.empty()) d.assign(rec.n_samples(), 0.0);
      for (std::size_t i = 0; i < component.size(); ++i) d[i] += (gain - 1.0) * component[i];
    }
  }
  return {deltas.begin(), deltas.end()};
}

EegRecording apply_class_signature(const EegRecording& rec, int class_id, const SubjectProfile& profile,
                                   double engagement) {
  SignalMatrix out = rec.data();
  for (const auto& [ch, delta] : class_signature_delta(rec, class_id, profile, engagement)) {
    double* row = out.row(static_cast<Eigen::Index>(ch)).data();
    for (std::size_t i = 0; i < delta.size(); ++i) row[i] += delta[i];
  }
  return rec.with_data(std::move(out));
}

EegRecording apply_trial_jitter(const EegRecording& rec, double jitter, std::uint64_t seed) {
  if (jitter <= 0.0) return rec;
  const auto bands = default_bands();
  std::vector<ButterworthBandpass> designs;
  for (const auto& b : bands) designs.emplace_back(rec.fs(), b.low_hz, b.high_hz);
  auto rng = make_rng(kJitter, seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  SignalMatrix out = rec.data();
  for (std::size_t c = 0; c < rec.n_channels(); ++c) {
    double* row = out.row(static_cast<Eigen::Index>(c)).data();
    for (const auto& design : designs) {
      const double gain = std::exp(jitter * normal(rng));
      const auto component = filtfilt(design, rec.channel(c));
      for (std::size_t i = 0; i < component.size(); ++i) row[i] += (gain - 1.0) * component[i];
    }
  }
  return rec.with_data(std::move(out));
}

double trial_engagement(const SubjectProfile& profile, std::size_t trial) {
  if (profile.disengaged_fraction <= 0.0) return 1.0;
  auto rng = make_rng(kEngagement, profile.seed, trial);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng) < profile.disengaged_fraction ? 0.0 : 1.0;
}

// ---------------------------------------------------------------------------

std::vector<int> trial_order(const SessionProtocol& protocol, std::uint64_t seed) {
  std::vector<int> order;
  auto rng = make_rng(kOrder, seed, 0);
  for (std::size_t rep = 0; rep < protocol.reps_per_class; ++rep) {
    std::vector<int> round = protocol.classes;
    if (protocol.randomize) std::shuffle(round.begin(), round.end(), rng);
    order.insert(order.end(), round.begin(), round.end());
  }
  return order;
}

Session generate_session(const SessionProtocol& protocol, const SubjectProfile& profile) {
  if (protocol.reps_per_class < 1 || protocol.classes.empty()) throw InvalidArgument("protocol needs classes and reps");
  if (!(protocol.trial_s > 0.0) || protocol.inter_trial_s < 0.0) throw InvalidArgument("invalid protocol timing");
  const double fs = profile.fs;
  const auto trial_samples = static_cast<std::size_t>(std::lround(protocol.trial_s * fs));
  const auto gap_samples = static_cast<std::size_t>(std::lround(protocol.inter_trial_s * fs));
  const auto order = trial_order(protocol, profile.seed);
  const std::size_t total = order.size() * trial_samples + (order.size() + 1) * gap_samples;

  const EegRecording noise = generate_noise(profile.n_channels, total, fs, profile.noise_slope, profile.seed);
  SignalMatrix data = noise.data();
  std::vector<TrialMarker> markers;
  std::size_t cursor = gap_samples;
  for (std::size_t t = 0; t < order.size(); ++t) {
    markers.push_back(TrialMarker{order[t], cursor, trial_samples});
    EegRecording trial = noise.slice(cursor, trial_samples);
    trial = apply_trial_jitter(trial, profile.trial_jitter, profile.seed * 1000003ULL + t);
    trial = apply_class_signature(trial, order[t], profile, trial_engagement(profile, t));
    data.middleCols(static_cast<Eigen::Index>(cursor), static_cast<Eigen::Index>(trial_samples)) = trial.data();
    cursor += trial_samples + gap_samples;
  }
  return Session{noise.with_data(std::move(data)), std::move(markers)};
}

// ---------------------------------------------------------------------------

std::vector<double> biphasic_waveform(std::size_t samples) {
  std::vector<double> w(samples);
  double peak = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(samples);
    // Hann-enveloped single sine cycle: one positive then one negative lobe.
    w[i] = std::sin(2.0 * std::numbers::pi * t) * std::sin(std::numbers::pi * t);
    peak = std::max(peak, std::abs(w[i]));
  }
  for (double& v : w) v /= peak;
  return w;
}

ArtifactResult inject_artifacts(const EegRecording& rec, double rate_per_minute, std::uint64_t seed) {
  if (rate_per_minute < 0.0) throw InvalidArgument("artifact rate must be non-negative");
  ArtifactResult result{rec, {}};
  if (rate_per_minute == 0.0) return result;

  const auto length = static_cast<std::size_t>(std::lround(kArtifactDurationS * rec.fs()));
  const auto shape = biphasic_waveform(length);
  std::vector<std::size_t> channels;
  if (rec.n_channels() <= default_layout().size()) channels = region_channels(ScalpRegion::Frontal, rec.n_channels());
  if (channels.empty()) channels.push_back(0);

  auto rng = make_rng(kArtifacts, seed, 0);
  std::exponential_distribution<double> gap(rate_per_minute / 60.0);
  const double last_onset = rec.duration_s() - kArtifactDurationS;
  for (double t = gap(rng); t < last_onset; t += gap(rng)) result.onsets_s.push_back(t);

  SignalMatrix data = rec.data();
  for (std::size_t ch : channels) {
    const auto row = rec.data().row(static_cast<Eigen::Index>(ch));
    const double rms = std::sqrt(row.array().square().mean());
    const double amplitude = kArtifactRmsMultiple * rms;
    for (double onset : result.onsets_s) {
      const auto start = static_cast<std::size_t>(std::lround(onset * rec.fs()));
      for (std::size_t i = 0; i < length && start + i < rec.n_samples(); ++i) {
        data(static_cast<Eigen::Index>(ch), static_cast<Eigen::Index>(start + i)) += amplitude * shape[i];
      }
    }
  }
  result.recording = rec.with_data(std::move(data));
  return result;
}

}  // namespace mindsculpt
