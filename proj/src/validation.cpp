#include "mindsculpt/classifier.hpp"
#include "mindsculpt/error.hpp"
#include "mindsculpt/selection.hpp"

#include <algorithm>
#include <iterator>
#include <map>
#include <set>

namespace mindsculpt {

std::vector<FoldSplit> loto_folds(const FeatureMatrix& fm, std::span<const int> classes) {
  if (!fm.labeled()) throw InvalidArgument("cross-validation needs a labeled feature matrix");
  std::vector<int> sorted(classes.begin(), classes.end());
  std::sort(sorted.begin(), sorted.end());

  // Trials of each class in order of first appearance.
  std::map<int, std::vector<int>> trials_of;
  for (std::size_t r = 0; r < fm.n_rows(); ++r) {
    if (!std::binary_search(sorted.begin(), sorted.end(), fm.labels[r])) continue;
    auto& list = trials_of[fm.labels[r]];
    if (std::find(list.begin(), list.end(), fm.trial_ids[r]) == list.end()) list.push_back(fm.trial_ids[r]);
  }
  std::size_t n_folds = 0;
  for (int c : sorted) {
    const std::size_t n = trials_of.contains(c) ? trials_of[c].size() : 0;
    if (n < 2) {
      throw InvalidArgument("class " + std::to_string(c) + " has " + std::to_string(n) +
                            " trial(s); leave-one-trial-out needs at least 2");
    }
    n_folds = n_folds == 0 ? n : std::min(n_folds, n);
  }

  std::vector<FoldSplit> folds(n_folds);
  for (std::size_t f = 0; f < n_folds; ++f) {
    std::set<int> held;
    for (int c : sorted) held.insert(trials_of[c][f]);
    folds[f].validation_trials.assign(held.begin(), held.end());
    for (std::size_t r = 0; r < fm.n_rows(); ++r) {
      if (!std::binary_search(sorted.begin(), sorted.end(), fm.labels[r])) continue;
      (held.contains(fm.trial_ids[r]) ? folds[f].validation_rows : folds[f].train_rows).push_back(r);
    }
  }
  return folds;
}

namespace {

std::size_t class_position(const std::vector<int>& classes, int c) {
  return static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), c) - classes.begin());
}

double jaccard(std::vector<std::size_t> a, std::vector<std::size_t> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<std::size_t> inter;
  std::vector<std::size_t> uni;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(uni));
  return uni.empty() ? 1.0 : static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

double window_accuracy(const TrainedModel& model, const FeatureMatrix& fm, std::span<const std::size_t> rows,
                       Eigen::MatrixXi* confusion) {
  if (rows.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t r : rows) {
    const int predicted = predict_class(model, fm.values.row(static_cast<Eigen::Index>(r)).transpose());
    if (predicted == fm.labels[r]) ++correct;
    if (confusion) {
      (*confusion)(static_cast<Eigen::Index>(class_position(model.classes, fm.labels[r])),
                   static_cast<Eigen::Index>(class_position(model.classes, predicted))) += 1;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

}  // namespace

CrossValidationReport cross_validate(const FeatureMatrix& fm, std::span<const int> classes,
                                     const TrainOptions& options) {
  const auto splits = loto_folds(fm, classes);
  CrossValidationReport report;
  report.classes.assign(classes.begin(), classes.end());
  std::sort(report.classes.begin(), report.classes.end());
  report.k = options.k;
  const auto n_classes = static_cast<Eigen::Index>(report.classes.size());
  report.confusion = Eigen::MatrixXi::Zero(n_classes, n_classes);

  double sum = 0.0;
  for (const auto& split : splits) {
    const FeatureMatrix train = fm.take_rows(split.train_rows);
    const TrainedModel model = train_model(train, report.classes, options);
    FoldResult fold;
    fold.validation_trials = split.validation_trials;
    fold.n_train_rows = split.train_rows.size();
    fold.n_validation_rows = split.validation_rows.size();
    fold.accuracy = window_accuracy(model, fm, split.validation_rows, &report.confusion);
    fold.selected = model.selected;
    sum += fold.accuracy;
    report.folds.push_back(std::move(fold));
  }
  report.mean_accuracy = sum / static_cast<double>(report.folds.size());

  std::vector<std::size_t> all_rows = splits.front().train_rows;
  all_rows.insert(all_rows.end(), splits.front().validation_rows.begin(), splits.front().validation_rows.end());
  std::sort(all_rows.begin(), all_rows.end());
  const TrainedModel full = train_model(fm.take_rows(all_rows), report.classes, options);
  report.resubstitution_accuracy = window_accuracy(full, fm, all_rows, nullptr);

  std::vector<std::size_t> stable = report.folds.front().selected;
  std::sort(stable.begin(), stable.end());
  double overlap = 0.0;
  std::size_t n_pairs = 0;
  for (std::size_t a = 0; a < report.folds.size(); ++a) {
    std::vector<std::size_t> sel = report.folds[a].selected;
    std::sort(sel.begin(), sel.end());
    std::vector<std::size_t> next;
    std::set_intersection(stable.begin(), stable.end(), sel.begin(), sel.end(), std::back_inserter(next));
    stable = std::move(next);
    for (std::size_t b = a + 1; b < report.folds.size(); ++b) {
      overlap += jaccard(report.folds[a].selected, report.folds[b].selected);
      ++n_pairs;
    }
  }
  report.stable_features = std::move(stable);
  report.mean_pairwise_overlap = n_pairs ? overlap / static_cast<double>(n_pairs) : 1.0;
  return report;
}

std::vector<SweepPoint> accuracy_vs_k(const FeatureMatrix& fm, std::span<const int> classes, std::size_t k_min,
                                      std::size_t k_max, const TrainOptions& options) {
  if (k_min < 1 || k_min > k_max || k_max > fm.n_features()) throw InvalidArgument("invalid k sweep range");
  const auto splits = loto_folds(fm, classes);
  std::vector<int> sorted(classes.begin(), classes.end());
  std::sort(sorted.begin(), sorted.end());

  std::vector<SweepPoint> points;
  for (std::size_t k = k_min; k <= k_max; ++k) points.push_back({k, 0.0});
  for (const auto& split : splits) {
    const FeatureMatrix train = fm.take_rows(split.train_rows);
    // Prefixes of one greedy ranking equal the rankings for every smaller k.
    const MrmrResult ranking = mrmr_select(train, k_max);
    for (auto& point : points) {
      const std::span<const std::size_t> prefix(ranking.ranked_indices.data(), point.k);
      const TrainedModel model = train_model_with_selection(train, sorted, prefix, options);
      point.mean_accuracy += window_accuracy(model, fm, split.validation_rows, nullptr);
    }
  }
  for (auto& point : points) point.mean_accuracy /= static_cast<double>(splits.size());
  return points;
}

}  // namespace mindsculpt
