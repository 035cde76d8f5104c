#include "mindsculpt/classifier.hpp"
#include "mindsculpt/error.hpp"

#include <algorithm>
#include <cmath>

namespace mindsculpt {

namespace {

constexpr double kMinPairwise = 1e-7;

}  // namespace

// Iterative scaling on the weighted Kullback-Leibler mismatch between the
// observed r(i, j) and mu(i, j) = p_i / (p_i + p_j), all pair counts equal.
Eigen::VectorXd couple_pairwise(const Eigen::MatrixXd& pairwise, int max_iterations, double tolerance) {
  const Eigen::Index k = pairwise.rows();
  if (k < 2 || pairwise.cols() != k) throw InvalidArgument("pairwise matrix must be square with at least two classes");
  Eigen::MatrixXd r = pairwise.cwiseMax(kMinPairwise).cwiseMin(1.0 - kMinPairwise);

  Eigen::VectorXd p = Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
  Eigen::VectorXd observed = Eigen::VectorXd::Zero(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      if (i != j) observed[i] += r(i, j);
    }
  }

  for (int iter = 0; iter < max_iterations; ++iter) {
    const Eigen::VectorXd previous = p;
    for (Eigen::Index i = 0; i < k; ++i) {
      double expected = 0.0;
      for (Eigen::Index j = 0; j < k; ++j) {
        if (i != j) expected += p[i] / (p[i] + p[j]);
      }
      p[i] *= observed[i] / expected;
      p /= p.sum();
    }
    if ((p - previous).cwiseAbs().maxCoeff() < tolerance) break;
  }
  p = p.cwiseMax(0.0).cwiseMin(1.0);
  return p / p.sum();
}

Eigen::VectorXd predict_posterior(const TrainedModel& model, const Eigen::VectorXd& feature_row) {
  if (static_cast<std::size_t>(feature_row.size()) != model.n_features_total) {
    throw InvalidArgument("feature row has " + std::to_string(feature_row.size()) + " entries, model expects " +
                          std::to_string(model.n_features_total));
  }
  const auto n_classes = static_cast<Eigen::Index>(model.n_classes());
  Eigen::VectorXd selected(static_cast<Eigen::Index>(model.selected.size()));
  for (std::size_t i = 0; i < model.selected.size(); ++i) {
    selected[static_cast<Eigen::Index>(i)] = feature_row[static_cast<Eigen::Index>(model.selected[i])];
  }
  const Eigen::VectorXd z = model.standardizer.apply(selected);

  if (n_classes == 2) {
    const auto& pair = model.pairs.front();
    const double p_high = std::clamp(pair.platt.probability(pair.svm.decision(z)), 0.0, 1.0);
    Eigen::VectorXd out(2);
    out << 1.0 - p_high, p_high;
    return out;
  }

  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n_classes, n_classes);
  std::size_t idx = 0;
  for (Eigen::Index i = 0; i < n_classes; ++i) {
    for (Eigen::Index j = i + 1; j < n_classes; ++j) {
      const auto& pair = model.pairs[idx++];
      const double p_high = pair.platt.probability(pair.svm.decision(z));
      r(j, i) = p_high;
      r(i, j) = 1.0 - p_high;
    }
  }
  return couple_pairwise(r);
}

int predict_class(const TrainedModel& model, const Eigen::VectorXd& feature_row) {
  Eigen::Index best = 0;
  predict_posterior(model, feature_row).maxCoeff(&best);
  return model.classes[static_cast<std::size_t>(best)];
}

}  // namespace mindsculpt
