#include <cmath>
#include <vector>

#include "abpcap/geom2d.hpp"
#include "abpcap/rng.hpp"
#include "doctest.h"

using namespace abpcap;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Independent Monte Carlo oracle for disk-restricted cell areas.
double mc_cell_disk_area(const ConvexCell& cell, double r, int samples, Rng rng) {
  int hits = 0;
  int total = 0;
  while (total < samples) {
    const double x = rng.uniform(-r, r);
    const double y = rng.uniform(-r, r);
    if (x * x + y * y > r * r) continue;
    ++total;
    if (cell.contains({x, y})) ++hits;
  }
  return kPi * r * r * static_cast<double>(hits) / samples;
}

ConvexCell random_cell(Rng& rng, int max_planes) {
  std::vector<HalfPlane> planes;
  const int n = static_cast<int>(rng.uniform_int(0, max_planes));
  for (int i = 0; i < n; ++i) {
    const Vec2 nu = unit_from_angle(rng.uniform(0.0, kTwoPi));
    planes.push_back({nu, rng.uniform(-1.5, 0.8)});
  }
  return ConvexCell::from_halfplanes(planes);
}

}  // namespace

TEST_CASE("halfplane_circle_arcs basic cases") {
  // Upper half circle.
  ArcSet a = halfplane_circle_arcs({{0.0, 1.0}, 0.0}, 1.0);
  CHECK(a.total_angle() == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(a.contains_angle(kPi / 2));
  CHECK(!a.contains_angle(-kPi / 2, 1e-9));

  // Tangent half-plane is empty.
  CHECK(halfplane_circle_arcs({{0.0, 1.0}, 1.0}, 1.0).empty());

  // Offset 0.5: arc (pi/6, 5pi/6) of length 2pi/3.
  ArcSet b = halfplane_circle_arcs({{0.0, 1.0}, 0.5}, 1.0);
  CHECK(b.total_angle() == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-12));
  REQUIRE(b.arcs().size() == 1);
  CHECK(b.arcs()[0].first == doctest::Approx(kPi / 6).epsilon(1e-12));
  CHECK(b.arcs()[0].second == doctest::Approx(5 * kPi / 6).epsilon(1e-12));

  // Far-side half-plane is the full circle.
  CHECK(halfplane_circle_arcs({{0.0, 1.0}, -1.0}, 1.0).is_full());
}

TEST_CASE("halfplane arc length formula") {
  Rng rng(41);
  for (int k = 0; k < 200; ++k) {
    const double r = rng.uniform(0.2, 3.0);
    const double off = rng.uniform(-0.99 * r, 0.99 * r);
    const Vec2 nu = unit_from_angle(rng.uniform(0.0, kTwoPi));
    const ArcSet a = halfplane_circle_arcs({nu, off}, r);
    CHECK(a.total_length() ==
          doctest::Approx(2.0 * r * std::acos(off / r)).epsilon(1e-12));
  }
}

TEST_CASE("cell_circle_arcs") {
  // Whole plane: full circle.
  CHECK(cell_circle_arcs(ConvexCell(), 2.0).total_length() ==
        doctest::Approx(2.0 * kPi * 2.0).epsilon(1e-12));

  // Diametral half-plane {y >= x}: one arc of length pi.
  const Vec2 n = Vec2{-1.0, 1.0}.normalized();
  ConvexCell half = ConvexCell::from_halfplanes({{n, 0.0}});
  CHECK(cell_circle_arcs(half, 1.0).total_length() == doctest::Approx(kPi).epsilon(1e-12));

  // Strip |y| <= 0.5: two arcs, each of length 2*asin(0.5) = pi/3.
  ConvexCell strip = ConvexCell::from_halfplanes(
      {{{0.0, 1.0}, -0.5}, {{0.0, -1.0}, -0.5}});
  const ArcSet arcs = cell_circle_arcs(strip, 1.0);
  CHECK(arcs.component_count() == 2);
  CHECK(arcs.total_length() == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-12));
}

TEST_CASE("cell_disk_area closed forms") {
  CHECK(cell_disk_area(ConvexCell(), 1.0) == doctest::Approx(kPi).epsilon(1e-12));

  ConvexCell above = ConvexCell::from_halfplanes({{{0.0, 1.0}, 0.5}});
  CHECK(cell_disk_area(above, 1.0) ==
        doctest::Approx(std::acos(0.5) - 0.5 * std::sqrt(0.75)).epsilon(1e-12));

  ConvexCell quadrant =
      ConvexCell::from_halfplanes({{{1.0, 0.0}, 0.0}, {{0.0, 1.0}, 0.0}});
  CHECK(cell_disk_area(quadrant, 1.0) == doctest::Approx(kPi / 4).epsilon(1e-12));
}

TEST_CASE("cell_disk_area against Monte Carlo oracle") {
  Rng rng(7);
  for (int k = 0; k < 25; ++k) {
    Rng local = rng.derive(k);
    const ConvexCell cell = random_cell(local, 5);
    const double r = local.uniform(0.5, 2.5);
    const double exact = cell_disk_area(cell, r);
    const int n = 200000;
    const double mc = mc_cell_disk_area(cell, r, n, local.derive(99));
    const double p = exact / (kPi * r * r);
    const double se = kPi * r * r * std::sqrt(std::max(p * (1 - p), 1e-6) / n);
    CHECK(std::abs(exact - mc) <= 4.0 * se + 1e-9);
  }
}

TEST_CASE("disk area monotone under clipping and bounded") {
  Rng rng(13);
  for (int k = 0; k < 100; ++k) {
    Rng local = rng.derive(k);
    const double r = local.uniform(0.3, 3.0);
    std::vector<HalfPlane> planes;
    double prev = kPi * r * r;
    for (int i = 0; i < 6; ++i) {
      planes.push_back({unit_from_angle(local.uniform(0.0, kTwoPi)),
                        local.uniform(-1.0, 0.7)});
      const ConvexCell cell = ConvexCell::from_halfplanes(planes);
      const double a = cell_disk_area(cell, r);
      CHECK(a >= -1e-12);
      CHECK(a <= kPi * r * r + 1e-12);
      CHECK(a <= prev + 1e-9);
      prev = a;
    }
  }
}

TEST_CASE("arc length is the r-derivative of disk area") {
  Rng rng(29);
  for (int k = 0; k < 60; ++k) {
    Rng local = rng.derive(k);
    const ConvexCell cell = random_cell(local, 4);
    const double r = local.uniform(0.4, 2.5);
    const double dr = 1e-5;
    const double da =
        (cell_disk_area(cell, r + dr) - cell_disk_area(cell, r - dr)) / (2 * dr);
    const double len = cell_circle_arcs(cell, r).total_length();
    if (len > 1e-6) {
      CHECK(std::abs(da - len) / std::max(1.0, len) <= 1e-6);
    }
  }
}

TEST_CASE("linear_range_on_arcs") {
  // Full circle: (-r, r).
  const auto [mn0, mx0] = linear_range_on_arcs(ArcSet::full(1.0), {0.3, 0.7});
  CHECK(mn0 == doctest::Approx(-1.0));
  CHECK(mx0 == doctest::Approx(1.0));

  // Arc (pi/4, 5pi/4) against e2: min sin(5pi/4), max sin(pi/2) = 1.
  ArcSet a = ArcSet::from_interval(1.0, kPi / 4, 5 * kPi / 4);
  const auto [mn, mx] = linear_range_on_arcs(a, {0.0, 1.0});
  CHECK(mn == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-12));
  CHECK(mx == doctest::Approx(1.0).epsilon(1e-12));

  // Monotone arc (pi/6, pi/3) against e2.
  ArcSet b = ArcSet::from_interval(1.0, kPi / 6, kPi / 3);
  const auto [mn2, mx2] = linear_range_on_arcs(b, {0.0, 1.0});
  CHECK(mn2 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mx2 == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));

  CHECK_THROWS_AS(linear_range_on_arcs(ArcSet::empty_set(1.0), {1.0, 0.0}),
                  EmptyArcSet);
}

TEST_CASE("cap_volume closed forms and scaling") {
  CHECK(cap_volume(2, 0.0, 1.0) == doctest::Approx(kPi / 2).epsilon(1e-14));
  CHECK(cap_volume(3, 0.0, 1.0) == doctest::Approx(2 * kPi / 3).epsilon(1e-14));
  CHECK(cap_volume(2, 0.5, 1.0) == doctest::Approx(0.6141848493043786).epsilon(1e-12));

  // Quadrature path agrees with the closed forms in an embedded check:
  // N=4 cap at lambda=0 is half the 4-ball, pi^2/4.
  CHECK(cap_volume(4, 0.0, 1.0) == doctest::Approx(kPi * kPi / 4).epsilon(1e-11));

  Rng rng(3);
  for (int k = 0; k < 40; ++k) {
    const int dim = static_cast<int>(rng.uniform_int(2, 6));
    const double lam = rng.uniform(-0.95, 0.95);
    const double r = rng.uniform(0.2, 2.0);
    CHECK(cap_volume(dim, lam, r) ==
          doctest::Approx(std::pow(r, dim) * cap_volume(dim, lam, 1.0)).epsilon(1e-12));
  }

  CHECK_THROWS_AS(cap_volume(2, 1.0, 1.0), InvalidLambda);
  CHECK_THROWS_AS(cap_volume(2, -1.2, 1.0), InvalidLambda);
}

TEST_CASE("canonicalization drops redundant constraints") {
  // Second plane is implied by the first (same normal, smaller offset).
  ConvexCell cell = ConvexCell::from_halfplanes(
      {{{0.0, 1.0}, 0.5}, {{0.0, 1.0}, -2.0}});
  CHECK(cell.halfplanes().size() == 1);
  CHECK(cell.halfplanes()[0].offset == doctest::Approx(0.5));

  // Redundant oblique constraint far away.
  ConvexCell cell2 = ConvexCell::from_halfplanes(
      {{{0.0, 1.0}, 0.0}, {{1.0, 0.0}, 0.0}, {Vec2{1.0, 1.0}.normalized(), -90.0}});
  CHECK(cell2.halfplanes().size() == 2);
}

TEST_CASE("degenerate slab is empty") {
  ConvexCell slab = ConvexCell::from_halfplanes(
      {{{0.0, 1.0}, 0.25}, {{0.0, -1.0}, -0.25}});
  CHECK(slab.empty());
  CHECK(cell_disk_area(slab, 1.0) == 0.0);

  ConvexCell infeasible = ConvexCell::from_halfplanes(
      {{{0.0, 1.0}, 1.0}, {{0.0, -1.0}, 1.0}});
  CHECK(infeasible.empty());
}

TEST_CASE("cell_halfplane_disk_area matches canonical construction") {
  Rng rng(77);
  for (int k = 0; k < 60; ++k) {
    Rng local = rng.derive(k);
    const ConvexCell cell = random_cell(local, 4);
    const HalfPlane extra{unit_from_angle(local.uniform(0.0, kTwoPi)),
                          local.uniform(-0.9, 0.9)};
    std::vector<HalfPlane> planes = cell.halfplanes();
    planes.push_back(extra);
    const ConvexCell direct = ConvexCell::from_halfplanes(planes);
    const double r = local.uniform(0.4, 2.0);
    CHECK(cell_halfplane_disk_area(cell, extra, r) ==
          doctest::Approx(cell_disk_area(direct, r)).epsilon(1e-10));
  }
}
