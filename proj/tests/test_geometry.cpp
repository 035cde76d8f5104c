#include "mindsculpt/error.hpp"
#include "mindsculpt/geometry.hpp"
#include "mindsculpt/io.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace mindsculpt;
using testing_support::TempDir;

namespace {

std::vector<double> w4(double a, double b, double c, double d) { return {a, b, c, d}; }

VoxelGrid from_cells(const std::vector<std::uint8_t>& cells, std::size_t n) {
  VoxelGrid g(n);
  for (std::size_t i = 0; i < cells.size(); ++i) g.set(i, cells[i] != 0);
  return g;
}

std::size_t count_prefix(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) n += line.rfind(prefix, 0) == 0;
  return n;
}

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("indexing and centers") {
    VoxelGrid g(4);
    CHECK(g.size() == 64);
    CHECK(g.index(1, 2, 3) == (1 * 4 + 2) * 4 + 3);
    CHECK(g.center(0) == doctest::Approx(-0.75));
    CHECK(g.center(3) == doctest::Approx(0.75));
    g.set(1, 2, 3, true);
    CHECK(g.occupied(27));
    CHECK(g.count() == 1);
    CHECK(g.occupied_indices() == std::vector<std::size_t>{27});
    CHECK_THROWS_AS(VoxelGrid(1), InvalidArgument);
  }
}

TEST_SUITE("shapes") {
  TEST_CASE("the cube fills a 2-grid") { CHECK(rasterize(BaseShape::Cube, 2).count() == 8); }

  TEST_CASE("pyramid is smaller than the cube; the torus has a hole") {
    const std::size_t n = 24;
    CHECK(rasterize(BaseShape::Pyramid, n).count() < rasterize(BaseShape::Cube, n).count());
    const auto torus = rasterize(BaseShape::SquareTorus, n);
    CHECK(torus.count() > 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          if (std::max(std::abs(torus.center(i)), std::abs(torus.center(j))) < 0.4) CHECK(!torus.occupied(i, j, k));
        }
  }

  TEST_CASE("rasterization matches the per-cell predicates") {
    for (std::size_t n : {8u, 24u, 31u}) {
      for (int s = 0; s < 4; ++s) {
        std::array<double, 4> w{};
        w[static_cast<std::size_t>(s)] = 1.0;
        CHECK(rasterize(static_cast<BaseShape>(s), n) == from_cells(oracle::blend_cells(w, n, 0.5), n));
      }
    }
  }

  TEST_CASE("resolution refinement: occupied fraction at n and 2n differs by under 0.05") {
    for (int s = 0; s < 4; ++s) {
      for (std::size_t n : {24u, 32u, 48u}) {
        const double a = static_cast<double>(rasterize(static_cast<BaseShape>(s), n).count()) / static_cast<double>(n * n * n);
        const double b = static_cast<double>(rasterize(static_cast<BaseShape>(s), 2 * n).count()) / static_cast<double>(8 * n * n * n);
        INFO("shape " << s << " n " << n << ": " << a << " vs " << b);
        CHECK(std::abs(a - b) < 0.05);
      }
    }
  }

  TEST_CASE("cube and torus are invariant under a quarter turn about z") {
    for (auto shape : {BaseShape::Cube, BaseShape::SquareTorus}) {
      const std::size_t n = 24;
      const auto g = rasterize(shape, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k) CHECK(g.occupied(i, j, k) == g.occupied(n - 1 - j, i, k));
    }
  }
}

TEST_SUITE("blend") {
  TEST_CASE("one-hot weights reproduce the base shapes") {
    for (std::size_t n : {8u, 24u, 48u}) {
      for (int s = 0; s < 4; ++s) {
        std::vector<double> w(4, 0.0);
        w[static_cast<std::size_t>(s)] = 1.0;
        const auto b = blend(BlendWeights::make(w), n);
        CHECK(b.cells() == rasterize(static_cast<BaseShape>(s), n).cells());
      }
    }
  }

  TEST_CASE("equal cube/pyramid weights give their intersection") {
    const std::size_t n = 24;
    const auto b = blend(BlendWeights::make(w4(0.5, 0.5, 0, 0)), n, 0.5);
    const auto cube = rasterize(BaseShape::Cube, n);
    const auto pyr = rasterize(BaseShape::Pyramid, n);
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(b.occupied(i) == (cube.occupied(i) && pyr.occupied(i)));
  }

  TEST_CASE("tau 0 gives the union of positively weighted shapes") {
    const std::size_t n = 20;
    const auto b = blend(BlendWeights::make(w4(0.1, 0, 0.9, 0)), n, 0.0);
    const auto cube = rasterize(BaseShape::Cube, n);
    const auto torus = rasterize(BaseShape::SquareTorus, n);
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(b.occupied(i) == (cube.occupied(i) || torus.occupied(i)));
  }

  TEST_CASE("random blends equal the brute-force oracle") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int inst = 0; inst < 40; ++inst) {
      std::array<double, 4> w{};
      double sum = 0.0;
      for (auto& v : w) sum += v = u(rng);
      for (auto& v : w) v /= sum;
      const double tau = u(rng) * 0.9;
      const std::size_t n = 8 + static_cast<std::size_t>(inst % 5) * 4;
      const auto got = blend(BlendWeights::make(std::vector<double>(w.begin(), w.end())), n, tau);
      CHECK(got == from_cells(oracle::blend_cells(w, n, tau), n));
    }
  }

  TEST_CASE("raising one weight never removes a cell of that shape") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 0.5);
    for (int inst = 0; inst < 20; ++inst) {
      std::vector<double> w{u(rng), u(rng), u(rng), u(rng)};
      const std::size_t s = static_cast<std::size_t>(inst % 4);
      const auto before = blend_unnormalized(w, 16, 0.5);
      w[s] += 0.2;
      const auto after = blend_unnormalized(w, 16, 0.5);
      const auto base = rasterize(static_cast<BaseShape>(s), 16);
      for (std::size_t i = 0; i < base.size(); ++i) {
        if (base.occupied(i) && before.occupied(i)) CHECK(after.occupied(i));
      }
    }
  }

  TEST_CASE("precomputed rasters give the same result") {
    std::vector<VoxelGrid> bases;
    for (int s = 0; s < 4; ++s) bases.push_back(rasterize(static_cast<BaseShape>(s), 24));
    const auto w = w4(0.2, 0.3, 0.1, 0.4);
    CHECK(blend_rasters(bases, w, 0.35) == blend(BlendWeights::make(w), 24, 0.35));
  }

  TEST_CASE("invalid weights are rejected") {
    CHECK_THROWS_AS(BlendWeights::make(w4(0.5, 0.5, 0.5, 0)), InvalidArgument);
    CHECK_THROWS_AS(BlendWeights::make(w4(1.5, -0.5, 0, 0)), InvalidArgument);
    CHECK_THROWS_AS(BlendWeights::make(std::vector<double>{1.0}), InvalidArgument);
    CHECK_THROWS_AS(BlendWeights::make(w4(std::nan(""), 1, 0, 0)), InvalidArgument);
  }
}

TEST_SUITE("mesh") {
  TEST_CASE("empty grid: valid file, no vertices") {
    const auto text = mesh_obj(VoxelGrid(6));
    const auto counts = parse_obj(text);
    CHECK(counts.vertices == 0);
    CHECK(counts.faces == 0);
  }

  TEST_CASE("one cell: 8 vertices, 12 triangles") {
    VoxelGrid g(4);
    g.set(1, 1, 1, true);
    const auto counts = parse_obj(mesh_obj(g));
    CHECK(counts.vertices == 8);
    CHECK(counts.faces == 12);
  }

  TEST_CASE("two adjacent cells lose 4 triangles compared with two isolated cells") {
    VoxelGrid adjacent(4), isolated(4);
    adjacent.set(1, 1, 1, true);
    adjacent.set(1, 1, 2, true);
    isolated.set(0, 0, 0, true);
    isolated.set(3, 3, 3, true);
    const auto a = parse_obj(mesh_obj(adjacent)).faces;
    const auto b = parse_obj(mesh_obj(isolated)).faces;
    CHECK(b == 24);
    CHECK(a == 2 * oracle::exposed_faces(adjacent.cells(), 4));
    CHECK(a == 20);
  }

  TEST_CASE("face counts match the exposed-face oracle on every base shape") {
    for (int s = 0; s < 4; ++s) {
      const auto g = rasterize(static_cast<BaseShape>(s), 16);
      const auto counts = parse_obj(mesh_obj(g));
      CHECK(counts.vertices == 8 * g.count());
      CHECK(counts.faces == 2 * oracle::exposed_faces(g.cells(), 16));
    }
  }

  TEST_CASE("triangles wind outward") {
    VoxelGrid g(2);
    g.set(0, 0, 0, true);
    std::istringstream in(mesh_obj(g));
    std::vector<std::array<double, 3>> v;
    std::string line;
    double cx = 0, cy = 0, cz = 0;
    std::vector<std::array<int, 3>> tris;
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::string tag;
      ls >> tag;
      if (tag == "v") {
        std::array<double, 3> p{};
        ls >> p[0] >> p[1] >> p[2];
        v.push_back(p);
        cx += p[0] / 8;
        cy += p[1] / 8;
        cz += p[2] / 8;
      } else if (tag == "f") {
        std::array<int, 3> t{};
        ls >> t[0] >> t[1] >> t[2];
        tris.push_back(t);
      }
    }
    REQUIRE(tris.size() == 12);
    for (const auto& t : tris) {
      const auto& a = v[static_cast<std::size_t>(t[0] - 1)];
      const auto& b = v[static_cast<std::size_t>(t[1] - 1)];
      const auto& c = v[static_cast<std::size_t>(t[2] - 1)];
      const std::array<double, 3> e1{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
      const std::array<double, 3> e2{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
      const std::array<double, 3> nrm{e1[1] * e2[2] - e1[2] * e2[1], e1[2] * e2[0] - e1[0] * e2[2], e1[0] * e2[1] - e1[1] * e2[0]};
      const double out = nrm[0] * (a[0] - cx) + nrm[1] * (a[1] - cy) + nrm[2] * (a[2] - cz);
      CHECK(out > 0.0);
    }
  }

  TEST_CASE("export is byte-deterministic and unwritable paths are I/O errors") {
    TempDir dir("mesh");
    const auto g = blend(BlendWeights::make(w4(0.25, 0.25, 0.25, 0.25)), 24, 0.2);
    export_mesh(g, dir.path() / "a.obj");
    export_mesh(g, dir.path() / "b.obj");
    const auto a = read_text_file(dir.path() / "a.obj");
    CHECK(a == read_text_file(dir.path() / "b.obj"));
    CHECK(a == mesh_obj(g));
    CHECK(count_prefix(a, "# grid 24") == 1);
    CHECK_THROWS_AS(export_mesh(g, dir.path() / "missing" / "x.obj"), IoError);
  }

  TEST_CASE("the OBJ reader rejects malformed files") {
    CHECK_THROWS_AS(parse_obj("v 0 0 0\nf 1 2 3\n"), InvalidData);
    CHECK_THROWS_AS(parse_obj("v 0 0\n"), InvalidData);
    CHECK_THROWS_AS(parse_obj("q 1 2 3\n"), InvalidData);
  }
}
