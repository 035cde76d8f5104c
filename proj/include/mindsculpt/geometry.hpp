#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mindsculpt {

// Cubic occupancy lattice over [-1, 1]^3. Cell (i, j, k) has flat index
// (i * n + j) * n + k and center (-1 + (2i + 1) / n, ...).
class VoxelGrid {
 public:
  explicit VoxelGrid(std::size_t n);

  std::size_t n() const { return n_; }
  std::size_t size() const { return cells_.size(); }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return (i * n_ + j) * n_ + k; }
  double center(std::size_t i) const { return -1.0 + static_cast<double>(2 * i + 1) / static_cast<double>(n_); }

  bool occupied(std::size_t i, std::size_t j, std::size_t k) const { return cells_[index(i, j, k)] != 0; }
  bool occupied(std::size_t flat) const { return cells_[flat] != 0; }
  void set(std::size_t i, std::size_t j, std::size_t k, bool value) { cells_[index(i, j, k)] = value ? 1 : 0; }
  void set(std::size_t flat, bool value) { cells_[flat] = value ? 1 : 0; }

  std::size_t count() const;
  std::vector<std::size_t> occupied_indices() const;
  const std::vector<std::uint8_t>& cells() const { return cells_; }

  bool operator==(const VoxelGrid&) const = default;

 private:
  std::size_t n_;
  std::vector<std::uint8_t> cells_;
};

enum class BaseShape : int { Cube = 0, Pyramid = 1, SquareTorus = 2, UnionCubes = 3 };
inline constexpr std::size_t kNumBaseShapes = 4;

bool inside(BaseShape shape, double x, double y, double z);

VoxelGrid rasterize(BaseShape shape, std::size_t n);

// Non-negative weights over the four base shapes summing to one.
class BlendWeights {
 public:
  static BlendWeights make(std::span<const double> w);  // throws InvalidArgument
  const std::array<double, kNumBaseShapes>& values() const { return w_; }

 private:
  std::array<double, kNumBaseShapes> w_{};
};

// Cell is occupied iff sum_i w_i * chi_i(cell) > tau. The strict comparison
// makes tau = 0 yield the union of positively weighted shapes and equal
// two-shape weights at tau = 0.5 yield their intersection.
VoxelGrid blend(const BlendWeights& weights, std::size_t n, double tau = 0.5);

// Same rule with arbitrary non-negative weights (no normalization check).
VoxelGrid blend_unnormalized(std::span<const double> weights, std::size_t n, double tau = 0.5);

// Same rule over precomputed base rasterizations of equal size.
VoxelGrid blend_rasters(std::span<const VoxelGrid> bases, std::span<const double> weights, double tau);

// Wavefront OBJ text: 8 vertices per occupied cell, two triangles per exposed
// face; faces shared by two occupied cells are omitted.
std::string mesh_obj(const VoxelGrid& grid);
void export_mesh(const VoxelGrid& grid, const std::filesystem::path& path);

struct ObjCounts {
  std::size_t vertices{0};
  std::size_t faces{0};
};

// Minimal OBJ reader used to check exported files; throws InvalidData on
// malformed records or out-of-range indices.
ObjCounts parse_obj(const std::string& text);

}  // namespace mindsculpt
