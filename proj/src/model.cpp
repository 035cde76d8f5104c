#include "mindsculpt/classifier.hpp"
#include "mindsculpt/error.hpp"
#include "mindsculpt/selection.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <set>

namespace mindsculpt {

using nlohmann::json;

namespace {

std::vector<int> checked_classes(std::span<const int> classes) {
  std::vector<int> sorted(classes.begin(), classes.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.size() < 2 || std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("a model needs at least two distinct classes");
  }
  return sorted;
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& values, std::span<const std::size_t> columns) {
  Eigen::MatrixXd out(values.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) = values.col(static_cast<Eigen::Index>(columns[i]));
  }
  return out;
}

// Decision values for each row from SVMs that never saw that row's trial.
std::vector<double> grouped_cv_scores(const Eigen::MatrixXd& z, std::span<const int> y, std::span<const int> trials,
                                      std::size_t folds, const SvmOptions& svm_options) {
  // Trials are assigned to folds round-robin within each class, in order of appearance.
  std::map<int, std::size_t> fold_of_trial;
  std::map<int, std::size_t> next_slot;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (!fold_of_trial.contains(trials[i])) fold_of_trial[trials[i]] = next_slot[y[i]]++ % folds;
  }
  std::vector<double> scores(trials.size(), 0.0);
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> held;
    std::vector<int> train_y;
    for (std::size_t i = 0; i < trials.size(); ++i) {
      if (fold_of_trial[trials[i]] == f) {
        held.push_back(static_cast<Eigen::Index>(i));
      } else {
        train.push_back(static_cast<Eigen::Index>(i));
        train_y.push_back(y[i]);
      }
    }
    if (held.empty()) continue;
    const BinarySvm svm = train_binary_svm(z(train, Eigen::all), train_y, svm_options);
    for (Eigen::Index i : held) scores[static_cast<std::size_t>(i)] = svm.decision(z.row(i).transpose());
  }
  return scores;
}

}  // namespace

TrainedModel train_model_with_selection(const FeatureMatrix& fm, std::span<const int> classes,
                                        std::span<const std::size_t> selected, const TrainOptions& options) {
  TrainedModel model;
  model.classes = checked_classes(classes);
  model.n_features_total = fm.n_features();
  model.selected.assign(selected.begin(), selected.end());
  if (model.selected.empty()) throw InvalidArgument("a model needs at least one selected feature");
  for (std::size_t s : model.selected) {
    if (s >= fm.n_features()) throw InvalidArgument("selected feature index out of range");
  }

  std::vector<Eigen::Index> rows;
  for (std::size_t r = 0; r < fm.n_rows(); ++r) {
    if (std::binary_search(model.classes.begin(), model.classes.end(), fm.labels[r])) {
      rows.push_back(static_cast<Eigen::Index>(r));
    }
  }
  const Eigen::MatrixXd x = select_columns(fm.values(rows, Eigen::all), model.selected);
  model.standardizer = Standardizer::fit(x);
  const Eigen::MatrixXd z = model.standardizer.apply(x);

  for (std::size_t a = 0; a < model.classes.size(); ++a) {
    for (std::size_t b = a + 1; b < model.classes.size(); ++b) {
      const int low = model.classes[a];
      const int high = model.classes[b];
      std::vector<Eigen::Index> pair_rows;
      std::vector<int> y;
      std::vector<int> trials;
      std::set<int> low_trials;
      std::set<int> high_trials;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = static_cast<std::size_t>(rows[i]);
        if (fm.labels[r] == low || fm.labels[r] == high) {
          pair_rows.push_back(static_cast<Eigen::Index>(i));
          y.push_back(fm.labels[r] == high ? 1 : -1);
          trials.push_back(fm.trial_ids[r]);
          (fm.labels[r] == high ? high_trials : low_trials).insert(fm.trial_ids[r]);
        }
      }
      if (low_trials.empty() || high_trials.empty()) {
        throw InvalidArgument("class pair (" + std::to_string(low) + ", " + std::to_string(high) +
                              ") lacks training rows for one class");
      }
      const Eigen::MatrixXd zp = z(pair_rows, Eigen::all);
      PairModel pm;
      pm.svm = train_binary_svm(zp, y, options.svm);
      pm.svm.class_pair = {low, high};

      const std::size_t folds =
          std::min({options.calibration_folds, low_trials.size(), high_trials.size()});
      std::vector<double> scores;
      if (folds >= 2) {
        scores = grouped_cv_scores(zp, y, trials, folds, options.svm);
      } else {
        for (Eigen::Index i = 0; i < zp.rows(); ++i) scores.push_back(pm.svm.decision(zp.row(i).transpose()));
      }
      pm.platt = fit_platt(scores, y);
      model.pairs.push_back(std::move(pm));
    }
  }
  return model;
}

TrainedModel train_model(const FeatureMatrix& fm, std::span<const int> classes, const TrainOptions& options) {
  const auto sorted = checked_classes(classes);
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < fm.n_rows(); ++r) {
    if (std::binary_search(sorted.begin(), sorted.end(), fm.labels[r])) rows.push_back(r);
  }
  const FeatureMatrix subset = fm.take_rows(rows);
  for (int c : sorted) {
    if (std::find(subset.labels.begin(), subset.labels.end(), c) == subset.labels.end()) {
      throw InvalidData("class " + std::to_string(c) + " has no training windows");
    }
  }
  const MrmrResult ranking = mrmr_select(subset, options.k);
  return train_model_with_selection(subset, sorted, ranking.ranked_indices, options);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string model_to_json(const TrainedModel& model) {
  json j;
  j["format"] = "mindsculpt-model";
  j["format_version"] = TrainedModel::kFormatVersion;
  j["classes"] = model.classes;
  j["n_features_total"] = model.n_features_total;
  j["selected"] = model.selected;
  j["bad_channels"] = model.bad_channels;
  j["standardizer"] = {{"mean", to_vector(model.standardizer.mean)}, {"std", to_vector(model.standardizer.std_dev)}};
  json pairs = json::array();
  for (const auto& p : model.pairs) {
    pairs.push_back({{"class_pair", {p.svm.class_pair.first, p.svm.class_pair.second}},
                     {"weights", to_vector(p.svm.weights)},
                     {"bias", p.svm.bias},
                     {"c", p.svm.c_param},
                     {"platt", {{"a", p.platt.a}, {"b", p.platt.b}}}});
  }
  j["pairs"] = std::move(pairs);
  return j.dump(2);
}

TrainedModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidData(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "mindsculpt-model") throw InvalidData("not a model document");
    const int version = j.at("format_version").get<int>();
    if (version != TrainedModel::kFormatVersion) {
      throw InvalidData("unsupported model format version " + std::to_string(version));
    }
    TrainedModel m;
    m.classes = j.at("classes").get<std::vector<int>>();
    m.n_features_total = j.at("n_features_total").get<std::size_t>();
    m.selected = j.at("selected").get<std::vector<std::size_t>>();
    m.bad_channels = j.at("bad_channels").get<std::vector<bool>>();
    m.standardizer.mean = from_vector(j.at("standardizer").at("mean").get<std::vector<double>>());
    m.standardizer.std_dev = from_vector(j.at("standardizer").at("std").get<std::vector<double>>());
    for (const auto& p : j.at("pairs")) {
      PairModel pm;
      const auto cp = p.at("class_pair").get<std::vector<int>>();
      if (cp.size() != 2) throw InvalidData("class_pair must have two entries");
      pm.svm.class_pair = {cp[0], cp[1]};
      pm.svm.weights = from_vector(p.at("weights").get<std::vector<double>>());
      pm.svm.bias = p.at("bias").get<double>();
      pm.svm.c_param = p.at("c").get<double>();
      pm.platt.a = p.at("platt").at("a").get<double>();
      pm.platt.b = p.at("platt").at("b").get<double>();
      m.pairs.push_back(std::move(pm));
    }
    const std::size_t nc = m.classes.size();
    const std::size_t k = m.selected.size();
    if (nc < 2 || m.pairs.size() != nc * (nc - 1) / 2) throw InvalidData("inconsistent class/pair count");
    if (static_cast<std::size_t>(m.standardizer.mean.size()) != k ||
        static_cast<std::size_t>(m.standardizer.std_dev.size()) != k) {
      throw InvalidData("standardizer width does not match the selection");
    }
    for (const auto& p : m.pairs) {
      if (static_cast<std::size_t>(p.svm.weights.size()) != k) throw InvalidData("SVM width does not match the selection");
    }
    for (std::size_t s : m.selected) {
      if (s >= m.n_features_total) throw InvalidData("selected index outside the feature space");
    }
    return m;
  } catch (const json::exception& e) {
    throw InvalidData(std::string("malformed model document: ") + e.what());
  }
}

}  // namespace mindsculpt
