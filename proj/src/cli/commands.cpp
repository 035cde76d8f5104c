#include "mindsculpt/cli.hpp"

#include "mindsculpt/classifier.hpp"
#include "mindsculpt/config.hpp"
#include "mindsculpt/error.hpp"
#include "mindsculpt/geometry.hpp"
#include "mindsculpt/io.hpp"
#include "mindsculpt/pipeline.hpp"
#include "mindsculpt/selection.hpp"
#include "mindsculpt/stream.hpp"
#include "mindsculpt/synth.hpp"
#include "mindsculpt/websocket.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

namespace mindsculpt::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::atomic<bool>& interrupt_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

namespace {

// Options shared by several subcommands; unset values defer to the config.
struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> snr;
  std::optional<std::size_t> k;
  std::optional<double> c;
  std::optional<std::size_t> grid;
  std::optional<double> tau;
  std::vector<int> classes;
};

Config resolve_config(const Common& o) {
  Config cfg = o.config_path.empty() ? Config{} : load_config(o.config_path);
  if (o.seed) cfg.synth.seed = *o.seed;
  if (o.snr) cfg.synth.snr = *o.snr;
  if (o.k) cfg.k = *o.k;
  if (o.c) cfg.svm.c = *o.c;
  if (o.grid) cfg.geometry.grid_n = *o.grid;
  if (o.tau) cfg.geometry.tau = *o.tau;
  if (!o.classes.empty()) cfg.classes = o.classes;
  return cfg;
}

void write_report(const std::string& path, const json& report) {
  if (!path.empty()) write_text_file(path, report.dump(2) + "\n");
}

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

std::string feature_name(const Session& session, const FeatureOptions& feat, std::size_t column) {
  const std::size_t nb = feat.bands.size();
  const std::size_t ch = column / nb;
  const std::string label =
      ch < session.recording.n_channels() ? session.recording.channel_labels()[ch] : "Ch" + std::to_string(ch + 1);
  return label + ":" + feat.bands[column % nb].name;
}

std::vector<std::pair<int, int>> parse_pairs(const std::string& text) {
  std::vector<std::pair<int, int>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = item.find('v');
    if (v == std::string::npos) throw InvalidArgument("pair '" + item + "' must look like 0v1");
    try {
      out.emplace_back(std::stoi(item.substr(0, v)), std::stoi(item.substr(v + 1)));
    } catch (const std::logic_error&) {
      throw InvalidArgument("pair '" + item + "' must look like 0v1");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string out_dir;
  std::string stem{"session"};
  std::optional<std::size_t> reps;
  std::optional<double> artifacts;
};

int cmd_synth_session(const Common& common, const SynthArgs& a, std::ostream& out) {
  Config cfg = resolve_config(common);
  if (a.reps) cfg.synth.reps = *a.reps;
  if (a.artifacts) cfg.synth.artifact_rate_per_min = *a.artifacts;
  Session session = generate_session(cfg.protocol(), cfg.subject_profile());
  std::size_t n_artifacts = 0;
  if (cfg.synth.artifact_rate_per_min > 0.0) {
    ArtifactResult art = inject_artifacts(session.recording, cfg.synth.artifact_rate_per_min, cfg.synth.seed);
    n_artifacts = art.onsets_s.size();
    session.recording = std::move(art.recording);
  }
  const SessionFiles files = write_session(session, a.out_dir, a.stem);

  const double fs = session.recording.fs();
  out << "session " << files.json.string() << "\n";
  out << fmt("%zu channels, %.1f s at %.0f Hz, %zu trials, %zu artifact bursts\n", session.recording.n_channels(),
             session.recording.duration_s(), fs, session.markers.size(), n_artifacts);
  out << "  trial  class  shape          onset_s  duration_s\n";
  for (std::size_t t = 0; t < session.markers.size(); ++t) {
    const auto& m = session.markers[t];
    out << fmt("  %5zu  %5d  %-13s %8.2f  %10.2f\n", t, m.class_id, shape_name(m.class_id),
               static_cast<double>(m.onset_sample) / fs, static_cast<double>(m.duration_samples) / fs);
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string session;
  std::string model_out;
  std::string report;
};

int cmd_train(const Common& common, const TrainArgs& a, std::ostream& out) {
  const Config cfg = resolve_config(common);
  const Session session = read_session(a.session);
  const SessionFeatures sf = session_features(session, cfg.signal, cfg.features);

  std::set<int> distinct(cfg.classes.begin(), cfg.classes.end());
  if (distinct.size() < 2 || distinct.size() != cfg.classes.size()) {
    throw InvalidArgument("train needs at least two distinct classes");
  }
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < sf.features.n_rows(); ++r) {
    if (distinct.contains(sf.features.labels[r])) rows.push_back(r);
  }
  const FeatureMatrix subset = sf.features.take_rows(rows);
  for (int c : distinct) {
    if (std::find(subset.labels.begin(), subset.labels.end(), c) == subset.labels.end()) {
      throw InvalidData("session has no windows of class " + std::to_string(c) + " (single-class data)");
    }
  }
  const std::vector<int> classes(distinct.begin(), distinct.end());
  const MrmrResult ranking = mrmr_select(subset, cfg.k);
  TrainedModel model = train_model_with_selection(subset, classes, ranking.ranked_indices, cfg.train_options());
  model.bad_channels = sf.bad_channels;

  std::size_t correct = 0;
  for (std::size_t r = 0; r < subset.n_rows(); ++r) {
    const Eigen::VectorXd row = subset.values.row(static_cast<Eigen::Index>(r)).transpose();
    if (predict_class(model, row) == subset.labels[r]) ++correct;
  }
  const double resub = subset.n_rows() ? static_cast<double>(correct) / static_cast<double>(subset.n_rows()) : 0.0;
  write_text_file(a.model_out, model_to_json(model));

  json selected = json::array();
  out << fmt("trained classes %s on %zu windows; resubstitution accuracy %.3f\n",
             json(classes).dump().c_str(), subset.n_rows(), resub);
  out << "  rank  feature           channel  band   relevance_nats  mrmr_score\n";
  for (std::size_t i = 0; i < model.selected.size(); ++i) {
    const std::size_t col = model.selected[i];
    const std::string name = feature_name(session, cfg.features, col);
    const std::size_t nb = cfg.features.bands.size();
    out << fmt("  %4zu  %-16s  %7zu  %-5s  %14.4f  %10.4f\n", i + 1, name.c_str(), col / nb,
               cfg.features.bands[col % nb].name.c_str(), ranking.relevance[col], ranking.score_trace[i]);
    selected.push_back({{"rank", i + 1},
                        {"column", col},
                        {"feature", name},
                        {"channel", col / nb},
                        {"band", cfg.features.bands[col % nb].name},
                        {"relevance", ranking.relevance[col]},
                        {"score", ranking.score_trace[i]}});
  }
  std::size_t n_bad = std::count(model.bad_channels.begin(), model.bad_channels.end(), true);
  out << fmt("model written to %s (%zu bad channels zeroed)\n", a.model_out.c_str(), n_bad);
  write_report(a.report, {{"classes", classes},
                          {"k", model.selected.size()},
                          {"n_windows", subset.n_rows()},
                          {"resubstitution_accuracy", resub},
                          {"selected", selected},
                          {"bad_channels", n_bad},
                          {"model", a.model_out}});
  return kOk;
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::string session;
  std::string pairs{"0v1,3v2,1v3"};
  bool no_four_class{false};
  std::string sweep_csv{"accuracy_vs_k.csv"};
  bool no_sweep{false};
  std::size_t k_min{4};
  std::size_t k_max{60};
  std::string report;
};

int cmd_validate(const Common& common, const ValidateArgs& a, std::ostream& out) {
  const Config cfg = resolve_config(common);
  const Session session = read_session(a.session);
  const SessionFeatures sf = session_features(session, cfg.signal, cfg.features);
  const TrainOptions opts = cfg.train_options();

  std::vector<std::vector<int>> tasks;
  for (const auto& [x, y] : parse_pairs(a.pairs)) tasks.push_back({x, y});
  if (!a.no_four_class) {
    std::set<int> present(sf.features.labels.begin(), sf.features.labels.end());
    present.erase(-1);
    if (present.size() > 2) tasks.emplace_back(present.begin(), present.end());
  }

  json results = json::array();
  out << "  task        classes     loto_acc  resub_acc  folds  stable_features  fold_overlap\n";
  double pair_sum = 0.0;
  std::size_t n_pairs = 0;
  std::vector<std::vector<SweepPoint>> sweeps;
  std::vector<std::string> sweep_names;
  for (const auto& task : tasks) {
    const CrossValidationReport rep = cross_validate(sf.features, task, opts);
    std::string name;
    for (std::size_t i = 0; i < task.size(); ++i) name += (i ? "v" : "") + std::to_string(task[i]);
    const std::string label = task.size() == 2 ? "pair" : std::to_string(task.size()) + "-class";
    out << fmt("  %-10s  %-10s  %8.3f  %9.3f  %5zu  %15zu  %12.3f\n", label.c_str(), name.c_str(), rep.mean_accuracy,
               rep.resubstitution_accuracy, rep.folds.size(), rep.stable_features.size(), rep.mean_pairwise_overlap);
    json folds = json::array();
    for (const auto& f : rep.folds) {
      folds.push_back({{"validation_trials", f.validation_trials},
                       {"n_train_rows", f.n_train_rows},
                       {"n_validation_rows", f.n_validation_rows},
                       {"accuracy", f.accuracy}});
    }
    json confusion = json::array();
    for (Eigen::Index r = 0; r < rep.confusion.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < rep.confusion.cols(); ++c) row.push_back(rep.confusion(r, c));
      confusion.push_back(row);
    }
    results.push_back({{"classes", task},
                       {"loto_accuracy", rep.mean_accuracy},
                       {"resubstitution_accuracy", rep.resubstitution_accuracy},
                       {"folds", folds},
                       {"confusion", confusion},
                       {"stable_features", rep.stable_features},
                       {"mean_pairwise_overlap", rep.mean_pairwise_overlap}});
    if (task.size() == 2) {
      pair_sum += rep.mean_accuracy;
      ++n_pairs;
      if (!a.no_sweep) {
        sweeps.push_back(accuracy_vs_k(sf.features, task, a.k_min, a.k_max, opts));
        sweep_names.push_back(name);
      }
    }
  }
  const double mean_pair = n_pairs ? pair_sum / static_cast<double>(n_pairs) : 0.0;
  out << fmt("mean two-class LOTO accuracy %.3f over %zu pair(s)\n", mean_pair, n_pairs);

  if (!a.no_sweep && !sweeps.empty()) {
    std::ostringstream csv;
    csv << "k";
    for (const auto& n : sweep_names) csv << ",acc_" << n;
    csv << ",mean\n";
    for (std::size_t i = 0; i < sweeps.front().size(); ++i) {
      double sum = 0.0;
      csv << sweeps.front()[i].k;
      for (const auto& s : sweeps) {
        csv << "," << fmt("%.6f", s[i].mean_accuracy);
        sum += s[i].mean_accuracy;
      }
      csv << "," << fmt("%.6f", sum / static_cast<double>(sweeps.size())) << "\n";
    }
    write_text_file(a.sweep_csv, csv.str());
    out << "accuracy-vs-k sweep written to " << a.sweep_csv << "\n";
  }
  write_report(a.report, {{"k", cfg.k}, {"tasks", results}, {"mean_pair_loto_accuracy", mean_pair}});
  return kOk;
}

// ---------------------------------------------------------------------------

struct RunArgs {
  std::string model;
  std::optional<std::string> source;
  std::string session;
  std::optional<std::string> pacing;
  std::optional<std::string> udp;
  std::optional<std::string> ws;
  std::optional<std::string> save_dir;
  double duration_s{0.0};
  int imagine{-1};
  std::string log;
};

int cmd_run(const Common& common, const RunArgs& a, std::ostream& out) {
  Config cfg = resolve_config(common);
  if (a.source) cfg.stream.source = *a.source == "synth-live" ? "synth" : *a.source;
  if (a.pacing) cfg.stream.pacing = *a.pacing;
  if (a.udp) cfg.stream.udp = *a.udp;
  if (a.ws) cfg.stream.ws = *a.ws;
  if (a.save_dir) cfg.stream.save_dir = *a.save_dir;
  if (cfg.stream.source != "synth" && cfg.stream.source != "replay") {
    throw InvalidArgument("--source must be synth or replay");
  }
  if (cfg.stream.pacing != "realtime" && cfg.stream.pacing != "fast") {
    throw InvalidArgument("--pacing must be realtime or fast");
  }

  TrainedModel model = model_from_json(read_text_file(a.model));
  PipelineOptions popts = cfg.pipeline_options();

  std::unique_ptr<SampleSource> source;
  if (cfg.stream.source == "replay") {
    if (a.session.empty()) throw InvalidArgument("--source replay needs --session");
    Session s = read_session(a.session);
    const auto block = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(cfg.stream.block_s * s.recording.fs())));
    source = std::make_unique<ReplaySource>(std::move(s.recording), block);
  } else {
    const SubjectProfile profile = cfg.subject_profile();
    const auto block = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(cfg.stream.block_s * profile.fs)));
    source = std::make_unique<SynthLiveSource>(profile, block, a.duration_s, a.imagine);
  }

  StreamPipeline pipeline(std::move(model), std::move(source), popts);
  const Endpoint udp = parse_endpoint(cfg.stream.udp);
  pipeline.add_sink(std::make_shared<UdpSink>(udp.host.empty() ? "127.0.0.1" : udp.host, udp.port));
  std::shared_ptr<WebSocketServer> ws;
  if (!cfg.stream.ws.empty()) {
    const Endpoint wse = parse_endpoint(cfg.stream.ws);
    ws = std::make_shared<WebSocketServer>(wse.host, wse.port,
                                           [&pipeline](const ControlCommand& cmd, WebSocketServer::AckFn done) {
                                             pipeline.control_async(cmd, std::move(done));
                                           });
    pipeline.add_sink(ws);
    out << "WebSocket clients: ws://" << (wse.host.empty() ? "0.0.0.0" : wse.host) << ":" << ws->port() << "\n";
  }
  out << "streaming " << cfg.stream.source << " (" << cfg.stream.pacing << ") to udp " << cfg.stream.udp << "\n";
  out.flush();

  interrupt_flag().store(false);
  std::atomic<bool> finished{false};
  std::thread watcher([&] {
    while (!finished.load()) {
      if (interrupt_flag().load()) {
        pipeline.request_stop();
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
  });
  SessionLog log;
  try {
    log = pipeline.run();
  } catch (...) {
    finished = true;
    watcher.join();
    throw;
  }
  finished = true;
  watcher.join();
  if (ws) ws->stop();

  const std::string text = session_log_json(log);
  if (!a.log.empty()) write_text_file(a.log, text + "\n");
  out << text << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct MeshArgs {
  std::vector<double> weights;
  std::string frame;
  std::string out_path;
};

int cmd_export_mesh(const Common& common, const MeshArgs& a, std::ostream& out) {
  const Config cfg = resolve_config(common);
  std::vector<double> w = a.weights;
  if (!a.frame.empty()) {
    if (!w.empty()) throw InvalidArgument("give either --weights or --frame, not both");
    json j;
    try {
      j = json::parse(read_text_file(a.frame));
      const auto& field = j.contains("weights") ? j.at("weights") : j.at("smoothed");
      w = field.get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw InvalidData("frame file " + a.frame + " has no usable weights: " + e.what());
    }
    if (j.contains("classes")) {
      // A frame over a subset of classes: spread onto the four shapes.
      const auto ids = j.at("classes").get<std::vector<int>>();
      if (ids.size() != w.size()) throw InvalidData("frame classes and weights differ in length");
      std::vector<double> full(kNumBaseShapes, 0.0);
      for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0 || ids[i] >= static_cast<int>(kNumBaseShapes)) throw InvalidData("frame class out of range");
        full[static_cast<std::size_t>(ids[i])] = w[i];
      }
      w = std::move(full);
    }
  }
  if (w.empty()) throw InvalidArgument("--weights or --frame is required");
  const BlendWeights weights = BlendWeights::make(w);
  const VoxelGrid grid = blend(weights, cfg.geometry.grid_n, cfg.geometry.tau);
  export_mesh(grid, a.out_path);
  out << fmt("wrote %s: grid %zu, tau %.3f, %zu occupied cells\n", a.out_path.c_str(), grid.n(), cfg.geometry.tau,
             grid.count());
  return kOk;
}

// ---------------------------------------------------------------------------

struct SelectArgs {
  std::string session;
  std::string features;
  std::string report;
};

int cmd_select_features(const Common& common, const SelectArgs& a, std::ostream& out) {
  const Config cfg = resolve_config(common);
  FeatureMatrix fm;
  if (!a.features.empty()) {
    fm = read_feature_matrix(a.features);
  } else if (!a.session.empty()) {
    fm = session_features(read_session(a.session), cfg.signal, cfg.features).features;
  } else {
    throw InvalidArgument("--session or --features is required");
  }
  std::set<int> wanted(cfg.classes.begin(), cfg.classes.end());
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < fm.n_rows(); ++r) {
    if (wanted.contains(fm.labels[r])) rows.push_back(r);
  }
  const FeatureMatrix subset = fm.take_rows(rows);
  if (std::set<int>(subset.labels.begin(), subset.labels.end()).size() < 2) {
    throw InvalidData("feature selection needs windows from at least two classes");
  }
  const MrmrResult r = mrmr_select(subset, cfg.k);
  json ranked = json::array();
  out << "  rank  column  channel  band  relevance_nats  mrmr_score\n";
  for (std::size_t i = 0; i < r.ranked_indices.size(); ++i) {
    const std::size_t col = r.ranked_indices[i];
    const auto& meta = subset.columns[col];
    out << fmt("  %4zu  %6zu  %7zu  %4zu  %14.4f  %10.4f\n", i + 1, col, meta.channel, meta.band, r.relevance[col],
               r.score_trace[i]);
    ranked.push_back({{"rank", i + 1},
                      {"column", col},
                      {"channel", meta.channel},
                      {"band", meta.band},
                      {"relevance", r.relevance[col]},
                      {"score", r.score_trace[i]}});
  }
  write_report(a.report, {{"classes", std::vector<int>(wanted.begin(), wanted.end())}, {"ranking", ranked}});
  return kOk;
}

struct ExtractArgs {
  std::string session;
  std::string out_path;
};

int cmd_extract_features(const Common& common, const ExtractArgs& a, std::ostream& out) {
  const Config cfg = resolve_config(common);
  const SessionFeatures sf = session_features(read_session(a.session), cfg.signal, cfg.features);
  write_feature_matrix(sf.features, a.out_path);
  out << fmt("wrote %s: %zu windows x %zu features\n", a.out_path.c_str(), sf.features.n_rows(),
             sf.features.n_features());
  return kOk;
}

void add_common(CLI::App* sub, Common& c, bool synth_opts, bool model_opts, bool geometry_opts) {
  sub->add_option("--config", c.config_path, "JSON config file")->check(CLI::ExistingFile);
  if (synth_opts) {
    sub->add_option("--seed", c.seed, "synthetic subject seed");
    sub->add_option("--snr", c.snr, "class signature strength (0 = none)");
  }
  if (model_opts) {
    sub->add_option("--k", c.k, "number of mRMR-selected features");
    sub->add_option("--c", c.c, "SVM box constraint");
    sub->add_option("--classes", c.classes, "class ids, comma separated")->delimiter(',');
  }
  if (geometry_opts) {
    sub->add_option("--grid", c.grid, "voxel grid resolution");
    sub->add_option("--tau", c.tau, "blend occupancy threshold");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthetic-EEG shape classification and voxel blending toolkit", "mindsculpt"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");

  Common common;
  SynthArgs synth;
  auto* s_synth = app.add_subcommand("synth-session", "generate a synthetic training session");
  add_common(s_synth, common, true, false, false);
  s_synth->add_option("--out-dir", synth.out_dir, "output directory")->required();
  s_synth->add_option("--stem", synth.stem, "file stem");
  s_synth->add_option("--reps", synth.reps, "trials per class");
  s_synth->add_option("--artifacts", synth.artifacts, "artifact bursts per minute");

  TrainArgs train;
  auto* s_train = app.add_subcommand("train", "fit a model on a session");
  add_common(s_train, common, false, true, false);
  s_train->add_option("--session", train.session, "session JSON")->required();
  s_train->add_option("--model-out", train.model_out, "model JSON to write")->required();
  s_train->add_option("--report", train.report, "training report JSON");

  ValidateArgs val;
  auto* s_val = app.add_subcommand("validate", "leave-one-trial-out validation of a session");
  add_common(s_val, common, false, true, false);
  s_val->add_option("--session", val.session, "session JSON")->required();
  s_val->add_option("--pairs", val.pairs, "two-class tasks, e.g. 0v1,3v2");
  s_val->add_flag("--no-four-class", val.no_four_class, "skip the all-class model");
  s_val->add_option("--sweep-csv", val.sweep_csv, "accuracy-vs-k CSV path");
  s_val->add_flag("--no-sweep", val.no_sweep, "skip the accuracy-vs-k sweep");
  s_val->add_option("--k-min", val.k_min, "sweep start");
  s_val->add_option("--k-max", val.k_max, "sweep end");
  s_val->add_option("--report", val.report, "validation report JSON");

  RunArgs runa;
  auto* s_run = app.add_subcommand("run", "stream posteriors and geometry in real time");
  add_common(s_run, common, true, false, true);
  s_run->add_option("--model", runa.model, "model JSON")->required();
  s_run->add_option("--source", runa.source, "synth or replay");
  s_run->add_option("--session", runa.session, "session JSON for replay");
  s_run->add_option("--pacing", runa.pacing, "realtime or fast");
  s_run->add_option("--udp", runa.udp, "MSCP destination host:port");
  s_run->add_option("--ws", runa.ws, "WebSocket listen address, e.g. :8080");
  s_run->add_option("--save-dir", runa.save_dir, "directory for saved meshes");
  s_run->add_option("--duration", runa.duration_s, "synth source length in seconds (0 = until interrupted)");
  s_run->add_option("--imagine", runa.imagine, "initial imagined class of the synth source (-1 = rest)");
  s_run->add_option("--log", runa.log, "session log JSON");

  MeshArgs mesh;
  auto* s_mesh = app.add_subcommand("export-mesh", "blend base shapes and write an OBJ mesh");
  add_common(s_mesh, common, false, false, true);
  s_mesh->add_option("--weights", mesh.weights, "four blend weights, comma separated")->delimiter(',');
  s_mesh->add_option("--frame", mesh.frame, "JSON file with 'weights' or 'smoothed'");
  s_mesh->add_option("--out", mesh.out_path, "OBJ path")->required();

  SelectArgs sel;
  auto* s_sel = app.add_subcommand("select-features", "rank features with mRMR");
  add_common(s_sel, common, false, true, false);
  s_sel->add_option("--session", sel.session, "session JSON");
  s_sel->add_option("--features", sel.features, "feature cache file");
  s_sel->add_option("--report", sel.report, "ranking JSON");

  ExtractArgs ext;
  auto* s_ext = app.add_subcommand("extract-features", "write the band-power feature cache of a session");
  add_common(s_ext, common, false, false, false);
  s_ext->add_option("--session", ext.session, "session JSON")->required();
  s_ext->add_option("--out", ext.out_path, "feature cache path")->required();

  std::vector<std::string> storage{"mindsculpt"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);

  try {
    if (s_synth->parsed()) return cmd_synth_session(common, synth, out);
    if (s_train->parsed()) return cmd_train(common, train, out);
    if (s_val->parsed()) return cmd_validate(common, val, out);
    if (s_run->parsed()) return cmd_run(common, runa, out);
    if (s_mesh->parsed()) return cmd_export_mesh(common, mesh, out);
    if (s_sel->parsed()) return cmd_select_features(common, sel, out);
    if (s_ext->parsed()) return cmd_extract_features(common, ext, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidData& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIo;
  }
  err << "no subcommand given\n";
  return kUsage;
}

}  // namespace mindsculpt::cli
