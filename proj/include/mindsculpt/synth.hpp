#pragma once

#include "mindsculpt/signal.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mindsculpt {

// ---------------------------------------------------------------------------
// Fixed 128-channel synthetic montage (compiled in from data/channel_layout_128.csv).

struct ChannelSite {
  std::string label;
  Point3 position;
};

const std::vector<ChannelSite>& default_layout();
std::vector<std::string> default_labels(std::size_t n_channels);
std::vector<Point3> default_positions(std::size_t n_channels);

enum class ScalpRegion { Frontal, Posterior, Parietal, Central };

// Channel indices of a region within the first n_channels sites, in index order.
std::vector<std::size_t> region_channels(ScalpRegion region, std::size_t n_channels);

// ---------------------------------------------------------------------------

struct RegionGain {
  std::vector<std::size_t> channels;
  BandDefinition band;
  double gain{1.0};  // multiplier on the band-limited component
};

struct SubjectProfile {
  std::uint64_t seed{1};
  double snr{1.0};
  double noise_slope{-1.0};
  std::size_t n_channels{128};
  double fs{256.0};
  std::map<int, std::vector<RegionGain>> region_map;
  // Per-trial, per-channel lognormal spread (natural-log sd) of background band
  // power. Stands in for session non-stationarity.
  double trial_jitter{0.0};
  // Probability that a trial carries no class signature at all (the subject
  // lost focus). Shared by every channel of the trial.
  double disengaged_fraction{0.0};
};

// Default region map at the given snr: simple shapes boost alpha on frontal and
// posterior subsets, complex shapes suppress alpha on parietal and central
// subsets, and every class carries its own theta subset.
std::map<int, std::vector<RegionGain>> default_region_map(double snr, std::size_t n_channels);

// Profile with the default region map and calibrated nuisance parameters.
SubjectProfile default_profile(std::uint64_t seed, double snr = 1.0, std::size_t n_channels = 128, double fs = 256.0);

struct SessionProtocol {
  std::vector<int> classes{0, 1, 2, 3};
  std::size_t reps_per_class{5};
  double trial_s{10.0};
  double inter_trial_s{2.0};
  bool randomize{true};
};

// 1/f^|slope| Gaussian noise scaled to 10 uV RMS per channel. Each channel's
// stream depends only on (seed, channel).
EegRecording generate_noise(std::size_t channels, std::size_t samples, double fs, double slope, std::uint64_t seed);

// Scales the band-limited component of each mapped channel by gain^engagement.
// Unmapped channels are copied bit for bit.
EegRecording apply_class_signature(const EegRecording& rec, int class_id, const SubjectProfile& profile,
                                   double engagement = 1.0);

// Additive per-channel change that apply_class_signature would make, for
// every mapped channel of the class.
std::vector<std::pair<std::size_t, std::vector<double>>> class_signature_delta(const EegRecording& rec, int class_id,
                                                                               const SubjectProfile& profile,
                                                                               double engagement = 1.0);

// Engagement (0 or 1) of trial t in a session generated from `profile`.
double trial_engagement(const SubjectProfile& profile, std::size_t trial);

// Multiplies each channel's theta/alpha/beta components by lognormal gains.
EegRecording apply_trial_jitter(const EegRecording& rec, double jitter, std::uint64_t seed);

struct Session {
  EegRecording recording;
  std::vector<TrialMarker> markers;
};

Session generate_session(const SessionProtocol& protocol, const SubjectProfile& profile);

// Order of classes over the session: shuffled within each repetition round
// when randomize is set, otherwise protocol.classes repeated.
std::vector<int> trial_order(const SessionProtocol& protocol, std::uint64_t seed);

struct ArtifactResult {
  EegRecording recording;
  std::vector<double> onsets_s;
};

// 0.3 s smooth biphasic transients at 50x the background RMS on frontal
// channels, at Poisson times.
ArtifactResult inject_artifacts(const EegRecording& rec, double rate_per_minute, std::uint64_t seed);

// Biphasic transient of unit peak magnitude sampled over `samples` points.
std::vector<double> biphasic_waveform(std::size_t samples);

}  // namespace mindsculpt
