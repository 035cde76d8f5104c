#pragma once

#include "mindsculpt/features.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mindsculpt {

inline constexpr int kMiBins = 5;

// Equal-frequency binning: a value's bin is floor(rank * bins / n), where rank
// is the number of strictly smaller values, so ties share the lower bin.
std::vector<int> discretize(std::span<const double> column, int bins = kMiBins);

// Plug-in mutual information in nats, clamped at zero.
double mutual_information(std::span<const int> a, std::span<const int> b);

struct MrmrResult {
  std::vector<std::size_t> ranked_indices;
  std::vector<double> relevance;    // I(f; y) for every column
  std::vector<double> score_trace;  // objective of each pick
};

// Greedy difference-form mRMR: first the most relevant column, then the column
// maximizing relevance minus mean redundancy with the picks so far. Ties go to
// the lower column index.
MrmrResult mrmr_select(const FeatureMatrix& fm, std::size_t k);

}  // namespace mindsculpt
