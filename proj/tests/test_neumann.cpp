#include <cmath>

#include "abpcap/capillary.hpp"
#include "abpcap/neumann.hpp"
#include "doctest.h"

using namespace abpcap;

namespace {

constexpr double kPi = 3.14159265358979323846;

ConvexSection slab_obstacle() {
  return ConvexSection::polygon({{-50, -20}, {50, -20}, {50, 0}, {-50, 0}});
}

// Least-squares fit of u against |x - x0|^2 / 2 + b; returns the nodal max
// deviation from the fitted quadratic.
double quadratic_fit_error(const NeumannSolution& sol) {
  double sxx = 0, sxy = 0, syy = 0, sx = 0, sy = 0, s1 = 0, rx = 0, ry = 0, r1 = 0;
  const int n = static_cast<int>(sol.u.size());
  for (int i = 0; i < n; ++i) {
    const Vec2 v = sol.mesh.vertices[i];
    const double target = sol.u[i] - 0.5 * v.norm2();
    sxx += v.x * v.x;
    sxy += v.x * v.y;
    syy += v.y * v.y;
    sx += v.x;
    sy += v.y;
    s1 += 1;
    rx += v.x * target;
    ry += v.y * target;
    r1 += target;
  }
  double a[3][4] = {{sxx, sxy, sx, rx}, {sxy, syy, sy, ry}, {sx, sy, s1, r1}};
  for (int c = 0; c < 3; ++c) {
    int p = c;
    for (int r = c; r < 3; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    std::swap(a[p], a[c]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
    }
  }
  const double px = a[0][3] / a[0][0];
  const double py = a[1][3] / a[1][1];
  const double b = a[2][3] / a[2][2];
  double max_err = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2 v = sol.mesh.vertices[i];
    const double model = 0.5 * v.norm2() + px * v.x + py * v.y + b;
    max_err = std::max(max_err, std::abs(sol.u[i] - model));
  }
  return max_err;
}

}  // namespace

TEST_CASE("marked mesh of the half-disk: markers and quality") {
  const auto poly = cap_polygon(0.0, 64);
  const MarkedMesh mesh = build_marked_mesh(poly, slab_obstacle(), 0.1);
  CHECK(mesh.min_angle_deg() >= 15.0);
  CHECK(mesh.has_gamma());
  // Bottom chord edges wetted, arc edges free.
  int contact_vertices = 0;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (mesh.vertex_class[i] == VertexClass::contact) ++contact_vertices;
  }
  CHECK(contact_vertices == 2);
  CHECK(mesh.gamma_length() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(mesh.sigma_length() == doctest::Approx(kPi).epsilon(2e-3));
  CHECK(mesh.area() == doctest::Approx(kPi / 2).epsilon(2e-3));
  // Gamma vertices carry the obstacle normal e2.
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (mesh.vertex_class[i] == VertexClass::gamma_region) {
      CHECK(mesh.obstacle_normal[i].y == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("marked mesh determinism") {
  const auto poly = cap_polygon(0.5, 32);
  const MarkedMesh a = build_marked_mesh(poly, slab_obstacle(), 0.08);
  const MarkedMesh b = build_marked_mesh(poly, slab_obstacle(), 0.08);
  REQUIRE(a.vertices.size() == b.vertices.size());
  REQUIRE(a.triangles.size() == b.triangles.size());
  for (std::size_t i = 0; i < a.vertices.size(); ++i) {
    CHECK(a.vertices[i].x == b.vertices[i].x);
    CHECK(a.vertices[i].y == b.vertices[i].y);
  }
}

TEST_CASE("droplet away from the obstacle: all edges free") {
  const std::vector<Vec2> square = {{-1, 2}, {1, 2}, {1, 4}, {-1, 4}};
  const MarkedMesh mesh = build_marked_mesh(square, slab_obstacle(), 0.2);
  CHECK(!mesh.has_gamma());
  CHECK(mesh.gamma_length() == 0.0);
  CHECK(mesh.sigma_length() == doctest::Approx(8.0).epsilon(1e-9));
}

TEST_CASE("non-simple domain polygon rejected") {
  const std::vector<Vec2> bowtie = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  CHECK_THROWS_AS(build_marked_mesh(bowtie, slab_obstacle(), 0.2), NonSimplePolygon);
}

TEST_CASE("square off the obstacle: c = perimeter / area") {
  const std::vector<Vec2> square = {{-1, 2}, {1, 2}, {1, 4}, {-1, 4}};
  const MarkedMesh mesh = build_marked_mesh(square, slab_obstacle(), 0.2);
  const NeumannSolution sol = solve_neumann(mesh, 0.3);
  CHECK(sol.c == doctest::Approx(8.0 / 4.0).epsilon(1e-12));
  CHECK(sol.residual_rel <= 1e-10);
  // Lumped-mass mean is zero.
  double mean = 0.0;
  double mass = 0.0;
  for (const auto& t : mesh.triangles) {
    const double area = 0.5 * (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                                  .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
    for (int k = 0; k < 3; ++k) {
      mean += area / 3.0 * sol.u[t[k]];
      mass += area / 3.0;
    }
  }
  CHECK(mean / mass == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("cap benchmark: c near 2 and quadratic nodal profile") {
  for (double lambda : {0.0, 0.5}) {
    const double h = 0.05;
    const int arcs = std::max(16, static_cast<int>(std::ceil(2 * std::acos(lambda) / (0.25 * h))));
    const auto poly = cap_polygon(lambda, arcs);
    const MarkedMesh mesh = build_marked_mesh(poly, slab_obstacle(), h);
    const NeumannSolution sol = solve_neumann(mesh, lambda);
    CHECK(std::abs(sol.c - 2.0) < 0.01 * 2.0);
    CHECK(quadratic_fit_error(sol) < 5.0 * h * h);
  }
}

TEST_CASE("cap error decreases at first order or better") {
  const double errs[2] = {
      [] {
        const auto poly = cap_polygon(0.0, 128);
        const MarkedMesh mesh = build_marked_mesh(poly, slab_obstacle(), 0.1);
        return quadratic_fit_error(solve_neumann(mesh, 0.0));
      }(),
      [] {
        const auto poly = cap_polygon(0.0, 128);
        const MarkedMesh mesh = build_marked_mesh(poly, slab_obstacle(), 0.05);
        return quadratic_fit_error(solve_neumann(mesh, 0.0));
      }(),
  };
  CHECK(errs[1] < errs[0]);
  CHECK(std::log2(errs[0] / errs[1]) >= 1.0);
}

TEST_CASE("lambda sign flip changes c by 2 lambda |Gamma| / |Omega| exactly") {
  const auto poly = cap_polygon(0.25, 48);
  const MarkedMesh mesh = build_marked_mesh(poly, slab_obstacle(), 0.1);
  const double lambda = 0.25;
  const NeumannSolution plus = solve_neumann(mesh, lambda);
  const NeumannSolution minus = solve_neumann(mesh, -lambda);
  CHECK(minus.c - plus.c ==
        doctest::Approx(2.0 * lambda * plus.gamma_len / plus.area).epsilon(1e-12));
}

TEST_CASE("touching classification: deterministic, constant-invariant") {
  const auto poly = cap_polygon(0.0, 48);
  const MarkedMesh mesh = build_marked_mesh(poly, slab_obstacle(), 0.08);
  NeumannSolution sol = solve_neumann(mesh, 0.0);

  const Touching t0 = touching_classify(sol, {0.0, 0.4});
  CHECK(t0.cls == TouchClass::interior);
  const Touching t1 = touching_classify(sol, {0.0, 0.4});
  CHECK(t0.vertex == t1.vertex);

  NeumannSolution shifted = sol;
  for (auto& v : shifted.u) v += 17.25;
  const Touching t2 = touching_classify(shifted, {0.0, 0.4});
  CHECK(t2.vertex == t0.vertex);
  CHECK(t2.cls == t0.cls);

  // A slope aimed straight down touches on the wetted side.
  const Touching down = touching_classify(sol, {0.0, -0.9});
  CHECK(down.cls == TouchClass::gamma);
}

TEST_CASE("estimate_sets on the half-disk") {
  const auto poly = cap_polygon(0.0, 128);
  const MarkedMesh mesh = build_marked_mesh(poly, slab_obstacle(), 0.05);
  const NeumannSolution sol = solve_neumann(mesh, 0.0);
  const SetEstimates est = estimate_sets(sol, 40000, 2024);
  // Crucial estimate at desk scale.
  CHECK(est.a_measure >= kPi / 2 - 3.0 * est.a_stderr - 2.0 * 0.05);
  REQUIRE(est.b_measure.has_value());
  CHECK(*est.b_measure == doctest::Approx(kPi / 2).epsilon(0.05));
  REQUIRE(est.violation_fraction.has_value());
  CHECK(*est.violation_fraction <= 0.02);
  // Determinism.
  const SetEstimates again = estimate_sets(sol, 40000, 2024);
  CHECK(again.a_measure == est.a_measure);
}

TEST_CASE("estimate_sets without wetted boundary") {
  const std::vector<Vec2> square = {{-1, 2}, {1, 2}, {1, 4}, {-1, 4}};
  const MarkedMesh mesh = build_marked_mesh(square, slab_obstacle(), 0.2);
  const NeumannSolution sol = solve_neumann(mesh, 0.0);
  const SetEstimates est = estimate_sets(sol, 20000, 5);
  CHECK(!est.b_measure.has_value());
  CHECK(!est.violation_fraction.has_value());
  CHECK(est.a_measure >= 0.0);
}

TEST_CASE("abp chain report on the cap and on a square droplet") {
  {
    const auto poly = cap_polygon(0.0, 128);
    const MarkedMesh mesh = build_marked_mesh(poly, slab_obstacle(), 0.05);
    const NeumannSolution sol = solve_neumann(mesh, 0.0);
    const ChainReport rep = abp_chain_report(sol, 40000, 99);
    CHECK(rep.lower_ok);
    CHECK(rep.upper_ok);
    CHECK(rep.c == doctest::Approx(2.0).epsilon(0.01));
    CHECK(rep.upper_bound == doctest::Approx(kPi / 2).epsilon(0.01));
  }
  {
    // Unit square resting on the slab: strict slack expected in the upper
    // bound (c/2)^2 |Omega| = (3/4)^2 * 4 = 2.25 > measured A.
    const std::vector<Vec2> square = {{-1, 0}, {1, 0}, {1, 2}, {-1, 2}};
    const MarkedMesh mesh = build_marked_mesh(square, slab_obstacle(), 0.05);
    const NeumannSolution sol = solve_neumann(mesh, 0.0);
    const ChainReport rep = abp_chain_report(sol, 40000, 7);
    CHECK(rep.lower_ok);
    CHECK(rep.upper_ok);
    CHECK(rep.upper_bound - rep.measured_a > 0.2);
  }
}

TEST_CASE("solver rejects lambda outside (-1, 1)") {
  const std::vector<Vec2> square = {{-1, 2}, {1, 2}, {1, 4}, {-1, 4}};
  const MarkedMesh mesh = build_marked_mesh(square, slab_obstacle(), 0.3);
  CHECK_THROWS_AS(solve_neumann(mesh, 1.0), InvalidLambda);
}
