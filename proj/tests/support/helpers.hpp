#pragma once

#include "mindsculpt/signal.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace testing_support {

inline mindsculpt::SignalMatrix white_noise(std::size_t channels, std::size_t samples, std::uint64_t seed,
                                            double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sd);
  mindsculpt::SignalMatrix m(static_cast<Eigen::Index>(channels), static_cast<Eigen::Index>(samples));
  for (Eigen::Index c = 0; c < m.rows(); ++c)
    for (Eigen::Index i = 0; i < m.cols(); ++i) m(c, i) = normal(rng);
  return m;
}

inline std::vector<double> sinusoid(double freq_hz, double amplitude, std::size_t samples, double fs,
                                    double phase = 0.0) {
  std::vector<double> x(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    x[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / fs + phase);
  }
  return x;
}

inline mindsculpt::EegRecording recording(mindsculpt::SignalMatrix m, double fs = 256.0) {
  return mindsculpt::EegRecording::with_default_labels(std::move(m), fs);
}

inline mindsculpt::EegRecording single_channel(const std::vector<double>& x, double fs = 256.0) {
  mindsculpt::SignalMatrix m(1, static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = x[i];
  return recording(std::move(m), fs);
}

inline double rms(std::span<const double> x, std::size_t begin = 0, std::size_t end = 0) {
  if (end == 0) end = x.size();
  double s = 0.0;
  for (std::size_t i = begin; i < end; ++i) s += x[i] * x[i];
  return std::sqrt(s / static_cast<double>(end - begin));
}

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("mindsculpt_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace testing_support
