#pragma once

#include "mindsculpt/features.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mindsculpt {

struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd std_dev;  // floored at 1e-9

  static Standardizer fit(const Eigen::MatrixXd& rows);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& rows) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& row) const;
};

struct SvmOptions {
  double c{1.0};
  double tolerance{1e-4};  // max projected-gradient violation
  int max_epochs{1000};
  std::uint64_t seed{1};
};

// Linear SVM for the pair (low, high) where +1 means class `high`. The bias is
// learned as the weight of a constant augmented feature.
struct BinarySvm {
  Eigen::VectorXd weights;
  double bias{0.0};
  double c_param{1.0};
  std::pair<int, int> class_pair{0, 1};

  double decision(const Eigen::VectorXd& x) const { return weights.dot(x) + bias; }
};

struct SvmFitInfo {
  Eigen::VectorXd alpha;
  int epochs{0};
  double max_violation{0.0};
  double dual_objective{0.0};
};

// L2-regularized hinge-loss dual coordinate descent. y entries are +1/-1.
BinarySvm train_binary_svm(const Eigen::MatrixXd& x, std::span<const int> y, const SvmOptions& options = {},
                           SvmFitInfo* info = nullptr);

// Dual objective 0.5 a'Qa - sum(a) with Q_ij = y_i y_j (x_i'x_j + 1).
double svm_dual_objective(const Eigen::MatrixXd& x, std::span<const int> y, const Eigen::VectorXd& alpha);

// p(+1 | s) = 1 / (1 + exp(a s + b)), with a < 0.
struct PlattCalibration {
  double a{-1.0};
  double b{0.0};

  double probability(double score) const;
};

PlattCalibration fit_platt(std::span<const double> scores, std::span<const int> y);

// Combines pairwise probabilities r(i, j) = P(i | i or j) into a distribution.
// Diagonal entries are ignored.
Eigen::VectorXd couple_pairwise(const Eigen::MatrixXd& pairwise, int max_iterations = 1000, double tolerance = 1e-8);

struct PairModel {
  BinarySvm svm;
  PlattCalibration platt;
};

struct TrainedModel {
  static constexpr int kFormatVersion = 1;

  std::vector<int> classes;            // ascending class ids, size 2 or 4
  std::size_t n_features_total{0};     // width of the full feature space
  std::vector<std::size_t> selected;   // mRMR ranking, indices into the full space
  Standardizer standardizer;           // over the selected columns
  std::vector<PairModel> pairs;        // (i, j) with i < j in class order
  std::vector<bool> bad_channels;      // channels zeroed before feature extraction

  std::size_t n_classes() const { return classes.size(); }
};

struct TrainOptions {
  std::size_t k{23};
  SvmOptions svm{};
  // Platt scores come from grouped CV over trials when enough trials exist.
  std::size_t calibration_folds{5};
};

// Standardize, rank and select, train one-vs-one SVMs and calibrate them.
// Rows whose label is not in `classes` are ignored.
TrainedModel train_model(const FeatureMatrix& fm, std::span<const int> classes, const TrainOptions& options);

// As train_model, with the feature ranking supplied by the caller.
TrainedModel train_model_with_selection(const FeatureMatrix& fm, std::span<const int> classes,
                                        std::span<const std::size_t> selected, const TrainOptions& options);

// Posterior over model.classes from a full-width feature row.
Eigen::VectorXd predict_posterior(const TrainedModel& model, const Eigen::VectorXd& feature_row);

int predict_class(const TrainedModel& model, const Eigen::VectorXd& feature_row);

std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);

// ---------------------------------------------------------------------------
// Leave-one-trial-out validation. Fold f holds out the f-th trial of every
// class; standardization, selection and the SVMs are refit on the remainder.

struct FoldResult {
  std::vector<int> validation_trials;
  std::size_t n_train_rows{0};
  std::size_t n_validation_rows{0};
  double accuracy{0.0};
  std::vector<std::size_t> selected;
};

struct CrossValidationReport {
  std::vector<int> classes;
  std::size_t k{0};
  std::vector<FoldResult> folds;
  double mean_accuracy{0.0};
  double resubstitution_accuracy{0.0};
  Eigen::MatrixXi confusion;        // rows true class, cols predicted, in class order
  std::vector<std::size_t> stable_features;  // selected in every fold
  double mean_pairwise_overlap{0.0};         // Jaccard of fold selections
};

// Row indices used for training and validation by each fold.
struct FoldSplit {
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> validation_rows;
  std::vector<int> validation_trials;
};

std::vector<FoldSplit> loto_folds(const FeatureMatrix& fm, std::span<const int> classes);

CrossValidationReport cross_validate(const FeatureMatrix& fm, std::span<const int> classes, const TrainOptions& options);

// Mean LOTO accuracy for each k in [k_min, k_max], reusing one ranking per fold.
struct SweepPoint {
  std::size_t k{0};
  double mean_accuracy{0.0};
};
std::vector<SweepPoint> accuracy_vs_k(const FeatureMatrix& fm, std::span<const int> classes, std::size_t k_min,
                                      std::size_t k_max, const TrainOptions& options);

}  // namespace mindsculpt
