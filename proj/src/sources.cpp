#include "mindsculpt/error.hpp"
#include "mindsculpt/stream.hpp"

#include <algorithm>
#include <cmath>

namespace mindsculpt {

void SampleSource::set_active_class(int) {
  throw InvalidArgument("imagine is only available on a synth-live source (this one is " + kind() + ")");
}

SynthLiveSource::SynthLiveSource(SubjectProfile profile, std::size_t block_samples, double duration_s, int initial_class)
    : profile_(std::move(profile)), block_samples_(block_samples), active_(-1) {
  if (block_samples_ == 0) throw InvalidArgument("block size must be positive");
  if (duration_s < 0.0) throw InvalidArgument("duration must be non-negative");
  limit_samples_ = static_cast<std::size_t>(std::llround(duration_s * profile_.fs));
  set_active_class(initial_class);
}

void SynthLiveSource::set_active_class(int class_id) {
  if (class_id != -1 && !profile_.region_map.contains(class_id)) {
    throw InvalidArgument("class " + std::to_string(class_id) + " has no signature in the synthetic subject");
  }
  active_.store(class_id);
}

void SynthLiveSource::make_segment() {
  const auto n = static_cast<std::size_t>(std::llround(kSegmentS * profile_.fs));
  // Segments get unrelated noise seeds so the stream never repeats.
  const std::uint64_t seed = profile_.seed ^ (0x9E3779B97F4A7C15ULL * (segment_index_ + 1));
  const EegRecording noise = generate_noise(profile_.n_channels, n, profile_.fs, profile_.noise_slope, seed);
  deltas_.clear();
  for (const auto& [class_id, gains] : profile_.region_map) {
    deltas_[class_id] = class_signature_delta(noise, class_id, profile_);
  }
  segment_ = noise.data();
  segment_pos_ = 0;
  ++segment_index_;
}

std::optional<SignalMatrix> SynthLiveSource::next_block() {
  std::size_t count = block_samples_;
  if (limit_samples_ > 0) {
    if (emitted_ >= limit_samples_) return std::nullopt;
    count = std::min(count, limit_samples_ - emitted_);
  }
  const int active = active_.load();
  SignalMatrix out(static_cast<Eigen::Index>(profile_.n_channels), static_cast<Eigen::Index>(count));
  std::size_t filled = 0;
  while (filled < count) {
    if (segment_.size() == 0 || segment_pos_ >= static_cast<std::size_t>(segment_.cols())) make_segment();
    const std::size_t take = std::min(count - filled, static_cast<std::size_t>(segment_.cols()) - segment_pos_);
    out.middleCols(static_cast<Eigen::Index>(filled), static_cast<Eigen::Index>(take)) =
        segment_.middleCols(static_cast<Eigen::Index>(segment_pos_), static_cast<Eigen::Index>(take));
    if (active >= 0) {
      for (const auto& [ch, delta] : deltas_.at(active)) {
        for (std::size_t i = 0; i < take; ++i) {
          out(static_cast<Eigen::Index>(ch), static_cast<Eigen::Index>(filled + i)) += delta[segment_pos_ + i];
        }
      }
    }
    segment_pos_ += take;
    filled += take;
  }
  emitted_ += count;
  return out;
}

// ---------------------------------------------------------------------------

ReplaySource::ReplaySource(EegRecording recording, std::size_t block_samples)
    : recording_(std::move(recording)), block_samples_(block_samples) {
  if (block_samples_ == 0) throw InvalidArgument("block size must be positive");
}

std::optional<SignalMatrix> ReplaySource::next_block() {
  if (pos_ >= recording_.n_samples()) return std::nullopt;
  const std::size_t count = std::min(block_samples_, recording_.n_samples() - pos_);
  SignalMatrix out = recording_.data().middleCols(static_cast<Eigen::Index>(pos_), static_cast<Eigen::Index>(count));
  pos_ += count;
  return out;
}

}  // namespace mindsculpt
