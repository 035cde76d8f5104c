#include "mindsculpt/classifier.hpp"
#include "mindsculpt/error.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace mindsculpt {

Standardizer Standardizer::fit(const Eigen::MatrixXd& rows) {
  if (rows.rows() == 0) throw InvalidArgument("cannot standardize an empty matrix");
  Standardizer s;
  s.mean = rows.colwise().mean().transpose();
  const Eigen::MatrixXd centered = rows.rowwise() - s.mean.transpose();
  s.std_dev = (centered.array().square().colwise().mean()).sqrt().transpose().cwiseMax(1e-9);
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& rows) const {
  return (rows.rowwise() - mean.transpose()).array().rowwise() / std_dev.transpose().array();
}

Eigen::VectorXd Standardizer::apply(const Eigen::VectorXd& row) const {
  return (row - mean).array() / std_dev.array();
}

// ---------------------------------------------------------------------------

namespace {

void check_binary_labels(std::span<const int> y, Eigen::Index rows) {
  if (static_cast<Eigen::Index>(y.size()) != rows) throw InvalidArgument("label count does not match row count");
  bool pos = false;
  bool neg = false;
  for (int v : y) {
    if (v == 1) {
      pos = true;
    } else if (v == -1) {
      neg = true;
    } else {
      throw InvalidArgument("binary labels must be +1 or -1");
    }
  }
  if (!pos || !neg) throw InvalidArgument("binary SVM training needs both classes present");
}

}  // namespace

double svm_dual_objective(const Eigen::MatrixXd& x, std::span<const int> y, const Eigen::VectorXd& alpha) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
  double bias = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    w += alpha[i] * y[static_cast<std::size_t>(i)] * x.row(i).transpose();
    bias += alpha[i] * y[static_cast<std::size_t>(i)];
  }
  return 0.5 * (w.squaredNorm() + bias * bias) - alpha.sum();
}

BinarySvm train_binary_svm(const Eigen::MatrixXd& x, std::span<const int> y, const SvmOptions& options,
                           SvmFitInfo* info) {
  check_binary_labels(y, x.rows());
  if (!(options.c > 0.0)) throw InvalidArgument("SVM C must be positive");
  const Eigen::Index n = x.rows();
  const double c = options.c;

  // The last coordinate of w_aug is the bias (constant feature of 1).
  Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
  double bias = 0.0;
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd q_diag(n);
  for (Eigen::Index i = 0; i < n; ++i) q_diag[i] = x.row(i).squaredNorm() + 1.0;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(options.seed);

  int epoch = 0;
  double max_violation = 0.0;
  for (; epoch < options.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    max_violation = 0.0;
    for (Eigen::Index i : order) {
      const double yi = y[static_cast<std::size_t>(i)];
      const double g = yi * (x.row(i).dot(w) + bias) - 1.0;
      double pg = g;
      if (alpha[i] <= 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha[i] >= c) {
        pg = std::max(g, 0.0);
      }
      max_violation = std::max(max_violation, std::abs(pg));
      if (pg == 0.0) continue;
      const double old = alpha[i];
      alpha[i] = std::clamp(old - g / q_diag[i], 0.0, c);
      const double delta = (alpha[i] - old) * yi;
      w += delta * x.row(i).transpose();
      bias += delta;
    }
    if (max_violation < options.tolerance) {
      ++epoch;
      break;
    }
  }

  if (info) {
    info->alpha = alpha;
    info->epochs = epoch;
    info->max_violation = max_violation;
    info->dual_objective = 0.5 * (w.squaredNorm() + bias * bias) - alpha.sum();
  }
  BinarySvm svm;
  svm.weights = w;
  svm.bias = bias;
  svm.c_param = c;
  return svm;
}

// ---------------------------------------------------------------------------

double PlattCalibration::probability(double score) const {
  const double f = a * score + b;
  // Evaluated on the branch that keeps exp() from overflowing.
  if (f >= 0.0) {
    const double e = std::exp(-f);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(f));
}

namespace {

struct PlattProblem {
  std::span<const double> scores;
  std::vector<double> targets;

  double objective(double a, double b) const {
    double f = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const double z = scores[i] * a + b;
      if (z >= 0.0) {
        f += targets[i] * z + std::log1p(std::exp(-z));
      } else {
        f += (targets[i] - 1.0) * z + std::log1p(std::exp(z));
      }
    }
    return f;
  }
};

// Newton iterations with backtracking on the smoothed-target log-likelihood.
// With fix_a set, only b is optimized.
void platt_newton(const PlattProblem& prob, double& a, double& b, bool fix_a) {
  constexpr int kMaxIterations = 100;
  constexpr double kGradTolerance = 1e-8;
  constexpr double kMinStep = 1e-10;
  constexpr double kSigma = 1e-12;

  double fval = prob.objective(a, b);
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < prob.scores.size(); ++i) {
      const double s = prob.scores[i];
      const double z = s * a + b;
      double p, q;
      if (z >= 0.0) {
        const double e = std::exp(-z);
        p = e / (1.0 + e);
        q = 1.0 / (1.0 + e);
      } else {
        const double e = std::exp(z);
        p = 1.0 / (1.0 + e);
        q = e / (1.0 + e);
      }
      const double d2 = p * q;
      h11 += s * s * d2;
      h22 += d2;
      h21 += s * d2;
      const double d1 = prob.targets[i] - p;
      g1 += s * d1;
      g2 += d1;
    }
    if (fix_a) {
      g1 = 0.0;
      h21 = 0.0;
    }
    if (std::abs(g1) < kGradTolerance && std::abs(g2) < kGradTolerance) break;

    const double det = h11 * h22 - h21 * h21;
    const double da = fix_a ? 0.0 : -(h22 * g1 - h21 * g2) / det;
    const double db = fix_a ? -g2 / h22 : -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;

    double step = 1.0;
    while (step >= kMinStep) {
      const double na = a + step * da;
      const double nb = b + step * db;
      const double nf = prob.objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < kMinStep) break;
  }
}

}  // namespace

PlattCalibration fit_platt(std::span<const double> scores, std::span<const int> y) {
  if (scores.size() != y.size() || scores.empty()) throw InvalidArgument("fit_platt needs matching scores and labels");
  double n_pos = 0.0;
  double n_neg = 0.0;
  for (int v : y) {
    if (v == 1) {
      n_pos += 1.0;
    } else if (v == -1) {
      n_neg += 1.0;
    } else {
      throw InvalidArgument("fit_platt labels must be +1 or -1");
    }
  }
  if (n_pos == 0.0 || n_neg == 0.0) throw InvalidArgument("fit_platt needs both classes present");

  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  if (*lo == *hi) {
    spdlog::warn("Platt calibration on constant scores; falling back to the class prior");
    const double prior = n_pos / (n_pos + n_neg);
    return PlattCalibration{-1.0, *lo + std::log((1.0 - prior) / prior)};
  }

  PlattProblem prob{scores, {}};
  prob.targets.resize(scores.size());
  const double hi_target = (n_pos + 1.0) / (n_pos + 2.0);
  const double lo_target = 1.0 / (n_neg + 2.0);
  for (std::size_t i = 0; i < y.size(); ++i) prob.targets[i] = y[i] == 1 ? hi_target : lo_target;

  double a = 0.0;
  double b = std::log((n_neg + 1.0) / (n_pos + 1.0));
  platt_newton(prob, a, b, false);
  if (!(a < 0.0)) {
    // Scores carry no usable ordering; keep the orientation and fit only the offset.
    constexpr double kFlatSlope = -1e-6;
    a = kFlatSlope;
    platt_newton(prob, a, b, true);
  }
  return PlattCalibration{a, b};
}

}  // namespace mindsculpt
