#include "mindsculpt/selection.hpp"

#include "mindsculpt/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mindsculpt {

namespace {

// Scores closer than this are treated as ties.
constexpr double kTieTolerance = 1e-12;

}  // namespace

std::vector<int> discretize(std::span<const double> column, int bins) {
  const std::size_t n = column.size();
  std::vector<int> out(n, 0);
  if (n == 0) return out;
  for (double v : column) {
    if (!std::isfinite(v)) throw InvalidData("discretize: non-finite value");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return column[a] < column[b]; });
  std::size_t rank = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && column[order[i]] != column[order[i - 1]]) rank = i;
    out[order[i]] = static_cast<int>((rank * static_cast<std::size_t>(bins)) / n);
  }
  return out;
}

double mutual_information(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size() || a.empty()) throw InvalidArgument("mutual_information needs equal non-empty inputs");
  const int na = *std::max_element(a.begin(), a.end()) + 1;
  const int nb = *std::max_element(b.begin(), b.end()) + 1;
  if (*std::min_element(a.begin(), a.end()) < 0 || *std::min_element(b.begin(), b.end()) < 0) {
    throw InvalidArgument("mutual_information needs non-negative symbols");
  }
  std::vector<double> joint(static_cast<std::size_t>(na * nb), 0.0);
  std::vector<double> pa(static_cast<std::size_t>(na), 0.0);
  std::vector<double> pb(static_cast<std::size_t>(nb), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[static_cast<std::size_t>(a[i] * nb + b[i])] += 1.0;
    pa[static_cast<std::size_t>(a[i])] += 1.0;
    pb[static_cast<std::size_t>(b[i])] += 1.0;
  }
  const double n = static_cast<double>(a.size());
  double mi = 0.0;
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      const double c = joint[static_cast<std::size_t>(i * nb + j)];
      if (c == 0.0) continue;
      // p(a,b) ln(p(a,b) / (p(a) p(b))) with counts: c/n * ln(c n / (ca cb))
      mi += (c / n) * std::log(c * n / (pa[static_cast<std::size_t>(i)] * pb[static_cast<std::size_t>(j)]));
    }
  }
  return std::max(0.0, mi);
}

MrmrResult mrmr_select(const FeatureMatrix& fm, std::size_t k) {
  if (!fm.labeled()) throw InvalidArgument("mRMR needs a fully labeled feature matrix");
  const std::size_t n_features = fm.n_features();
  if (k < 1 || k > n_features) {
    throw InvalidArgument("mRMR k=" + std::to_string(k) + " outside [1, " + std::to_string(n_features) + "]");
  }

  std::vector<std::vector<int>> binned(n_features);
  const auto n_rows = static_cast<Eigen::Index>(fm.n_rows());
  std::vector<double> column(fm.n_rows());
  for (std::size_t f = 0; f < n_features; ++f) {
    for (Eigen::Index r = 0; r < n_rows; ++r) column[static_cast<std::size_t>(r)] = fm.values(r, static_cast<Eigen::Index>(f));
    binned[f] = discretize(column);
  }

  MrmrResult result;
  result.relevance.resize(n_features);
  for (std::size_t f = 0; f < n_features; ++f) result.relevance[f] = mutual_information(binned[f], fm.labels);

  std::vector<double> redundancy_sum(n_features, 0.0);
  std::vector<bool> taken(n_features, false);
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t best = n_features;
    double best_score = 0.0;
    const double denom = static_cast<double>(step);
    for (std::size_t f = 0; f < n_features; ++f) {
      if (taken[f]) continue;
      const double score = step == 0 ? result.relevance[f] : result.relevance[f] - redundancy_sum[f] / denom;
      if (best == n_features || score > best_score + kTieTolerance) {
        best = f;
        best_score = score;
      }
    }
    taken[best] = true;
    result.ranked_indices.push_back(best);
    result.score_trace.push_back(best_score);
    if (step + 1 < k) {
      for (std::size_t f = 0; f < n_features; ++f) {
        if (!taken[f]) redundancy_sum[f] += mutual_information(binned[f], binned[best]);
      }
    }
  }
  return result;
}

}  // namespace mindsculpt
