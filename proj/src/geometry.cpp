#include "mindsculpt/geometry.hpp"

#include "mindsculpt/error.hpp"
#include "mindsculpt/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace mindsculpt {

VoxelGrid::VoxelGrid(std::size_t n) : n_(n), cells_(n * n * n, 0) {
  if (n < 2) throw InvalidArgument("voxel grid needs n >= 2");
}

std::size_t VoxelGrid::count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

std::vector<std::size_t> VoxelGrid::occupied_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i]) out.push_back(i);
  }
  return out;
}

bool inside(BaseShape shape, double x, double y, double z) {
  const double ax = std::abs(x);
  const double ay = std::abs(y);
  const double az = std::abs(z);
  switch (shape) {
    case BaseShape::Cube:
      return std::max({ax, ay, az}) <= 0.8;
    case BaseShape::Pyramid:
      // Square base at z = -0.8, apex at (0, 0, 0.8).
      return z >= -0.8 && z <= 0.8 && std::max(ax, ay) <= 0.8 * (0.8 - z) / 1.6;
    case BaseShape::SquareTorus: {
      const double r = std::max(ax, ay);
      return r >= 0.4 && r <= 0.8 && az <= 0.2;
    }
    case BaseShape::UnionCubes:
      return std::max({std::abs(x + 0.3), std::abs(y + 0.3), std::abs(z + 0.3)}) <= 0.5 ||
             std::max({std::abs(x - 0.3), std::abs(y - 0.3), std::abs(z - 0.3)}) <= 0.5;
  }
  return false;
}

VoxelGrid rasterize(BaseShape shape, std::size_t n) {
  VoxelGrid grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        grid.set(i, j, k, inside(shape, grid.center(i), grid.center(j), grid.center(k)));
      }
    }
  }
  return grid;
}

BlendWeights BlendWeights::make(std::span<const double> w) {
  if (w.size() != kNumBaseShapes) throw InvalidArgument("blend weights need exactly four entries");
  BlendWeights out;
  double sum = 0.0;
  for (std::size_t i = 0; i < kNumBaseShapes; ++i) {
    if (!std::isfinite(w[i]) || w[i] < 0.0) throw InvalidArgument("blend weights must be finite and non-negative");
    out.w_[i] = w[i];
    sum += w[i];
  }
  if (std::abs(sum - 1.0) > 1e-6) throw InvalidArgument("blend weights must sum to 1 (got " + std::to_string(sum) + ")");
  return out;
}

VoxelGrid blend_rasters(std::span<const VoxelGrid> bases, std::span<const double> weights, double tau) {
  if (bases.empty() || bases.size() != weights.size()) throw InvalidArgument("one weight per base shape is required");
  if (!(tau >= 0.0 && tau < 1.0)) throw InvalidArgument("tau must lie in [0, 1)");
  VoxelGrid grid(bases.front().n());
  for (const auto& b : bases) {
    if (b.n() != grid.n()) throw InvalidArgument("base rasterizations differ in size");
  }
  for (std::size_t c = 0; c < grid.size(); ++c) {
    double score = 0.0;
    for (std::size_t s = 0; s < bases.size(); ++s) {
      if (bases[s].occupied(c)) score += weights[s];
    }
    grid.set(c, score > tau);
  }
  return grid;
}

VoxelGrid blend_unnormalized(std::span<const double> weights, std::size_t n, double tau) {
  if (weights.size() != kNumBaseShapes) throw InvalidArgument("blend weights need exactly four entries");
  const std::vector<VoxelGrid> bases{rasterize(BaseShape::Cube, n), rasterize(BaseShape::Pyramid, n),
                                     rasterize(BaseShape::SquareTorus, n), rasterize(BaseShape::UnionCubes, n)};
  return blend_rasters(bases, weights, tau);
}

VoxelGrid blend(const BlendWeights& weights, std::size_t n, double tau) {
  return blend_unnormalized(weights.values(), n, tau);
}

// ---------------------------------------------------------------------------

namespace {

// Corner c of a cell is offset (c & 1, (c >> 1) & 1, (c >> 2) & 1).
// Quads are wound counter-clockwise seen from outside.
struct FaceSpec {
  int axis;
  int dir;
  int quad[4];
};

constexpr FaceSpec kFaces[6] = {
    {0, -1, {0, 4, 6, 2}}, {0, +1, {1, 3, 7, 5}}, {1, -1, {0, 1, 5, 4}},
    {1, +1, {2, 6, 7, 3}}, {2, -1, {0, 2, 3, 1}}, {2, +1, {4, 5, 7, 6}},
};

}  // namespace

std::string mesh_obj(const VoxelGrid& grid) {
  const std::size_t n = grid.n();
  const double h = 2.0 / static_cast<double>(n);
  std::string out = "# mindsculpt voxel mesh\n# grid " + std::to_string(n) + " cells " + std::to_string(grid.count()) + "\n";
  std::string faces;
  char buf[128];
  std::size_t base = 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (!grid.occupied(i, j, k)) continue;
        const std::size_t ijk[3] = {i, j, k};
        for (int c = 0; c < 8; ++c) {
          const double x = -1.0 + h * static_cast<double>(i + (c & 1));
          const double y = -1.0 + h * static_cast<double>(j + ((c >> 1) & 1));
          const double z = -1.0 + h * static_cast<double>(k + ((c >> 2) & 1));
          std::snprintf(buf, sizeof(buf), "v %.6f %.6f %.6f\n", x, y, z);
          out += buf;
        }
        for (const auto& face : kFaces) {
          std::size_t nb[3] = {ijk[0], ijk[1], ijk[2]};
          const std::size_t a = static_cast<std::size_t>(face.axis);
          const bool has_neighbor = face.dir < 0 ? nb[a] > 0 : nb[a] + 1 < n;
          if (has_neighbor) {
            nb[a] = face.dir < 0 ? nb[a] - 1 : nb[a] + 1;
            if (grid.occupied(nb[0], nb[1], nb[2])) continue;
          }
          const auto v = [&](int q) { return base + static_cast<std::size_t>(face.quad[q]); };
          std::snprintf(buf, sizeof(buf), "f %zu %zu %zu\nf %zu %zu %zu\n", v(0), v(1), v(2), v(0), v(2), v(3));
          faces += buf;
        }
        base += 8;
      }
    }
  }
  return out + faces;
}

void export_mesh(const VoxelGrid& grid, const std::filesystem::path& path) { write_text_file(path, mesh_obj(grid)); }

ObjCounts parse_obj(const std::string& text) {
  ObjCounts counts;
  std::istringstream in(text);
  std::string line;
  std::vector<std::size_t> face_indices;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream rec(line);
    std::string tag;
    rec >> tag;
    if (tag == "v") {
      double x, y, z;
      if (!(rec >> x >> y >> z)) throw InvalidData("bad vertex record on line " + std::to_string(line_no));
      ++counts.vertices;
    } else if (tag == "f") {
      std::size_t a, b, c;
      if (!(rec >> a >> b >> c)) throw InvalidData("bad face record on line " + std::to_string(line_no));
      face_indices.insert(face_indices.end(), {a, b, c});
      ++counts.faces;
    } else {
      throw InvalidData("unknown OBJ record '" + tag + "' on line " + std::to_string(line_no));
    }
  }
  for (std::size_t idx : face_indices) {
    if (idx < 1 || idx > counts.vertices) throw InvalidData("face index out of range");
  }
  return counts;
}

}  // namespace mindsculpt
