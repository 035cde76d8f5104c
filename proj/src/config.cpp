#include "mindsculpt/config.hpp"

#include "mindsculpt/error.hpp"
#include "mindsculpt/io.hpp"

#include <json.hpp>

#include <cmath>
#include <functional>
#include <set>
#include <type_traits>

namespace mindsculpt {

using nlohmann::json;

namespace {

// Reads keys from one JSON object and rejects any key it was not asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw InvalidData("config: '" + where() + "' must be an object");
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    known_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    // nlohmann converts -1 to a huge unsigned value without complaint.
    if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
      if (!it->is_number_unsigned()) throw InvalidData("config: '" + where(key) + "' must be a non-negative integer");
    }
    if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw InvalidData("config: '" + where(key) + "' has the wrong type");
    }
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw InvalidData("config: '" + where(key) + "' has the wrong type");
    }
  }

  void read_if_present(const std::string& key, const std::function<void(const json&, const std::string&)>& fn) {
    known_.insert(key);
    const auto it = j_.find(key);
    if (it != j_.end()) fn(*it, where(key));
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!known_.contains(key)) throw InvalidData("config: unknown key '" + where(key) + "'");
    }
  }

  std::string where(const std::string& key = "") const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> known_;
};

void section(Section& parent, const std::string& key, const std::function<void(Section&)>& body) {
  parent.read_if_present(key, [&](const json& j, const std::string& path) {
    Section s(j, path);
    body(s);
    s.finish();
  });
}

}  // namespace

Config parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidData(std::string("config is not valid JSON: ") + e.what());
  }
  Config c;
  Section top(root, "");
  int version = Config::kSchemaVersion;
  top.read("schema_version", version);
  if (version != Config::kSchemaVersion) {
    throw InvalidData("config schema_version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(Config::kSchemaVersion) + ")");
  }

  section(top, "signal", [&](Section& s) {
    s.read("bandpass_low_hz", c.signal.bandpass_low_hz);
    s.read("bandpass_high_hz", c.signal.bandpass_high_hz);
    s.read("asr_enabled", c.signal.asr_enabled);
    s.read("asr_sd_threshold", c.signal.asr_sd_threshold);
    s.read("asr_window_s", c.signal.asr_window_s);
    s.read("asr_calibration_s", c.signal.asr_calibration_s);
    s.read("amplitude_guard_uv", c.signal.amplitude_guard_uv);
  });
  section(top, "features", [&](Section& s) {
    s.read("window_s", c.features.window.window_s);
    s.read("step_s", c.features.window.step_s);
    s.read_if_present("bands", [&](const json& j, const std::string& path) {
      if (!j.is_array() || j.size() != c.features.bands.size()) {
        throw InvalidData("config: '" + path + "' must list exactly three bands");
      }
      for (std::size_t i = 0; i < j.size(); ++i) {
        Section b(j[i], path + "[" + std::to_string(i) + "]");
        b.read("name", c.features.bands[i].name);
        b.read("low_hz", c.features.bands[i].low_hz);
        b.read("high_hz", c.features.bands[i].high_hz);
        b.finish();
      }
    });
  });
  section(top, "selection", [&](Section& s) { s.read("k", c.k); });
  section(top, "classifier", [&](Section& s) {
    s.read("classes", c.classes);
    s.read("c", c.svm.c);
    s.read("tolerance", c.svm.tolerance);
    s.read("max_epochs", c.svm.max_epochs);
    s.read("seed", c.svm.seed);
    s.read("calibration_folds", c.calibration_folds);
  });
  section(top, "synth", [&](Section& s) {
    s.read("seed", c.synth.seed);
    s.read("snr", c.synth.snr);
    s.read("n_channels", c.synth.n_channels);
    s.read("fs", c.synth.fs);
    s.read("reps", c.synth.reps);
    s.read("trial_s", c.synth.trial_s);
    s.read("inter_trial_s", c.synth.inter_trial_s);
    s.read("randomize", c.synth.randomize);
    s.read("artifact_rate_per_min", c.synth.artifact_rate_per_min);
    s.read("noise_slope", c.synth.noise_slope);
    s.read("trial_jitter", c.synth.trial_jitter);
    s.read("disengaged_fraction", c.synth.disengaged_fraction);
  });
  section(top, "geometry", [&](Section& s) {
    s.read("grid_n", c.geometry.grid_n);
    s.read("tau", c.geometry.tau);
  });
  section(top, "stream", [&](Section& s) {
    s.read("source", c.stream.source);
    s.read("pacing", c.stream.pacing);
    s.read("udp", c.stream.udp);
    s.read("ws", c.stream.ws);
    s.read("smoothing_alpha", c.stream.smoothing_alpha);
    s.read("block_s", c.stream.block_s);
    s.read("save_dir", c.stream.save_dir);
    s.read("sample_queue_blocks", c.stream.sample_queue_blocks);
    s.read("sink_queue_capacity", c.stream.sink_queue_capacity);
    s.read("stall_timeout_s", c.stream.stall_timeout_s);
  });
  top.finish();

  if (c.stream.source != "synth" && c.stream.source != "replay") {
    throw InvalidData("config: stream.source must be 'synth' or 'replay'");
  }
  if (c.stream.pacing != "realtime" && c.stream.pacing != "fast") {
    throw InvalidData("config: stream.pacing must be 'realtime' or 'fast'");
  }
  return c;
}

Config load_config(const std::filesystem::path& path) { return parse_config(read_text_file(path)); }

std::string config_to_json(const Config& c) {
  json bands = json::array();
  for (const auto& b : c.features.bands) bands.push_back({{"name", b.name}, {"low_hz", b.low_hz}, {"high_hz", b.high_hz}});
  const json j{
      {"schema_version", Config::kSchemaVersion},
      {"signal",
       {{"bandpass_low_hz", c.signal.bandpass_low_hz},
        {"bandpass_high_hz", c.signal.bandpass_high_hz},
        {"asr_enabled", c.signal.asr_enabled},
        {"asr_sd_threshold", c.signal.asr_sd_threshold},
        {"asr_window_s", c.signal.asr_window_s},
        {"asr_calibration_s", c.signal.asr_calibration_s},
        {"amplitude_guard_uv", c.signal.amplitude_guard_uv}}},
      {"features", {{"window_s", c.features.window.window_s}, {"step_s", c.features.window.step_s}, {"bands", bands}}},
      {"selection", {{"k", c.k}}},
      {"classifier",
       {{"classes", c.classes},
        {"c", c.svm.c},
        {"tolerance", c.svm.tolerance},
        {"max_epochs", c.svm.max_epochs},
        {"seed", c.svm.seed},
        {"calibration_folds", c.calibration_folds}}},
      {"synth",
       {{"seed", c.synth.seed},
        {"snr", c.synth.snr},
        {"n_channels", c.synth.n_channels},
        {"fs", c.synth.fs},
        {"reps", c.synth.reps},
        {"trial_s", c.synth.trial_s},
        {"inter_trial_s", c.synth.inter_trial_s},
        {"randomize", c.synth.randomize},
        {"artifact_rate_per_min", c.synth.artifact_rate_per_min},
        {"noise_slope", c.synth.noise_slope},
        {"trial_jitter", c.synth.trial_jitter},
        {"disengaged_fraction", c.synth.disengaged_fraction}}},
      {"geometry", {{"grid_n", c.geometry.grid_n}, {"tau", c.geometry.tau}}},
      {"stream",
       {{"source", c.stream.source},
        {"pacing", c.stream.pacing},
        {"udp", c.stream.udp},
        {"ws", c.stream.ws},
        {"smoothing_alpha", c.stream.smoothing_alpha},
        {"block_s", c.stream.block_s},
        {"save_dir", c.stream.save_dir},
        {"sample_queue_blocks", c.stream.sample_queue_blocks},
        {"sink_queue_capacity", c.stream.sink_queue_capacity},
        {"stall_timeout_s", c.stream.stall_timeout_s}}},
  };
  return j.dump(2);
}

TrainOptions Config::train_options() const {
  TrainOptions t;
  t.k = k;
  t.svm = svm;
  t.calibration_folds = calibration_folds;
  return t;
}

SubjectProfile Config::subject_profile() const {
  SubjectProfile p = default_profile(synth.seed, synth.snr, synth.n_channels, synth.fs);
  p.noise_slope = synth.noise_slope;
  if (synth.trial_jitter >= 0.0) p.trial_jitter = synth.trial_jitter;
  if (synth.disengaged_fraction >= 0.0) p.disengaged_fraction = synth.disengaged_fraction;
  return p;
}

SessionProtocol Config::protocol() const {
  SessionProtocol p;
  p.reps_per_class = synth.reps;
  p.trial_s = synth.trial_s;
  p.inter_trial_s = synth.inter_trial_s;
  p.randomize = synth.randomize;
  return p;
}

PipelineOptions Config::pipeline_options() const {
  PipelineOptions o;
  o.bandpass_low_hz = signal.bandpass_low_hz;
  o.bandpass_high_hz = signal.bandpass_high_hz;
  o.window = features.window;
  o.bands = features.bands;
  o.smoothing_alpha = stream.smoothing_alpha;
  o.grid_n = geometry.grid_n;
  o.tau = geometry.tau;
  o.pacing = stream.pacing == "fast" ? Pacing::Fast : Pacing::Realtime;
  o.save_dir = stream.save_dir;
  o.sample_queue_blocks = stream.sample_queue_blocks;
  o.sink_queue_capacity = stream.sink_queue_capacity;
  o.stall_timeout_s = stream.stall_timeout_s;
  return o;
}

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw InvalidArgument("endpoint '" + text + "' must look like host:port or :port");
  Endpoint e;
  e.host = text.substr(0, colon);
  const std::string port = text.substr(colon + 1);
  std::size_t used = 0;
  long value = -1;
  try {
    value = std::stol(port, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (port.empty() || used != port.size() || value < 0 || value > 65535) {
    throw InvalidArgument("endpoint '" + text + "' has an invalid port");
  }
  e.port = static_cast<std::uint16_t>(value);
  return e;
}

}  // namespace mindsculpt
