#include <cmath>

#include "abpcap/capillary.hpp"
#include "abpcap/rng.hpp"
#include "doctest.h"

using namespace abpcap;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Flat support: a wide slab whose top edge is {y = 0}.
ConvexSection slab_obstacle() {
  return ConvexSection::polygon({{-50, -20}, {50, -20}, {50, 0}, {-50, 0}});
}

}  // namespace

TEST_CASE("unit square resting on the slab: free 3, wetted 1") {
  CapillaryScene scene;
  scene.obstacle = slab_obstacle();
  scene.droplet = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  scene.lambda = 0.5;
  const EnergyBreakdown e = capillary_energy(scene);
  CHECK(e.free_perimeter == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(e.wetted == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.energy == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(e.volume == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.margin > 0.0);
}

TEST_CASE("floating droplet: wetted zero, energy is the full perimeter") {
  CapillaryScene scene;
  scene.obstacle = slab_obstacle();
  scene.droplet = {{-1, 2}, {1, 2}, {1, 4}, {-1, 4}};
  scene.lambda = -0.7;
  const EnergyBreakdown e = capillary_energy(scene);
  CHECK(e.wetted == 0.0);
  CHECK(e.free_perimeter == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(e.energy == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("64-gon half-disk on the slab: J within 1% of pi, margin positive") {
  CapillaryScene scene;
  scene.obstacle = slab_obstacle();
  scene.droplet = cap_polygon(0.0, 64);
  scene.lambda = 0.0;
  const EnergyBreakdown e = capillary_energy(scene);
  CHECK(e.wetted == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::abs(e.energy - kPi) / kPi < 0.01);
  CHECK(e.margin > 0.0);
}

TEST_CASE("reference energy closed forms") {
  CHECK(reference_energy(2, 0.0, kPi / 2) == doctest::Approx(kPi).epsilon(1e-13));
  CHECK(reference_energy(3, 0.0, 2 * kPi / 3) == doctest::Approx(2 * kPi).epsilon(1e-13));
  CHECK(reference_energy(2, 0.5, 0.6141848493043786) ==
        doctest::Approx(2 * 0.6141848493043786).epsilon(1e-12));
  CHECK_THROWS_AS(reference_energy(2, 0.0, -1.0), InvalidVolume);
  CHECK_THROWS_AS(reference_energy(2, 1.0, 1.0), InvalidLambda);
}

TEST_CASE("reference scaling identity") {
  Rng rng(9);
  for (int k = 0; k < 40; ++k) {
    const int dim = static_cast<int>(rng.uniform_int(2, 5));
    const double lam = rng.uniform(-0.9, 0.9);
    const double c0 = cap_volume(dim, lam, 1.0);
    for (double r : {0.5, 1.0, 2.0}) {
      CHECK(reference_energy(dim, lam, std::pow(r, dim) * c0) ==
            doctest::Approx(dim * c0 * std::pow(r, dim - 1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("reference energy strictly increasing and strictly concave in v") {
  Rng rng(15);
  for (int k = 0; k < 20; ++k) {
    const double lam = rng.uniform(-0.9, 0.9);
    const int dim = static_cast<int>(rng.uniform_int(2, 4));
    double prev = 0.0;
    double prev_diff = 1e300;
    const double dv = 0.05;
    for (int i = 1; i <= 40; ++i) {
      const double v = dv * i;
      const double j = reference_energy(dim, lam, v);
      CHECK(j > prev);
      if (i > 1) {
        const double diff = j - prev;
        CHECK(diff < prev_diff);  // second differences negative
        prev_diff = diff;
      }
      prev = j;
    }
  }
}

TEST_CASE("strict concavity probe") {
  CHECK(strict_concavity_probe(2, 0.0, kPi / 2, kPi / 4));
  CHECK(strict_concavity_probe(2, 0.0, kPi / 2, kPi / 2 * 1e-6));
  CHECK(strict_concavity_probe(3, 0.4, 1.0, 0.5));
  CHECK_THROWS_AS(strict_concavity_probe(2, 0.0, 1.0, 1.0), InvalidVolume);
}

TEST_CASE("k-gon cap margins decrease toward zero at order about 2") {
  std::vector<double> margins;
  for (int k : {8, 16, 32, 64, 128}) {
    CapillaryScene scene;
    scene.obstacle = slab_obstacle();
    scene.droplet = cap_polygon(0.3, k);
    scene.lambda = 0.3;
    const EnergyBreakdown e = capillary_energy(scene);
    CHECK(e.margin > 0.0);
    if (!margins.empty()) CHECK(e.margin < margins.back());
    margins.push_back(e.margin);
  }
  // Least-squares slope of log margin vs log(1/k).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  int k = 8;
  for (double m : margins) {
    const double x = std::log(1.0 / k);
    const double y = std::log(m);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
    k *= 2;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope >= 1.8);
}

TEST_CASE("wedge-wetting droplet has a strictly positive margin plateau") {
  double last = 0.0;
  for (int k : {16, 32, 64, 128}) {
    const WedgeScene w = wedge_scene(0.4, k);
    const EnergyBreakdown e = capillary_energy(w.scene);
    CHECK(e.wetted == doctest::Approx(2 * std::sqrt(2.0) * w.ridge_span).epsilon(1e-9));
    CHECK(e.margin > 0.0);
    last = e.margin;
  }
  CHECK(last > 0.05);  // bounded away from zero under refinement
}

TEST_CASE("scene validation errors") {
  CapillaryScene scene;
  scene.obstacle = slab_obstacle();
  scene.droplet = {{0, -1}, {1, -1}, {1, 1}, {0, 1}};  // pokes into the slab
  scene.lambda = 0.0;
  CHECK_THROWS_AS(capillary_energy(scene), OverlappingScene);

  scene.droplet = {{0, 1}, {1, 1}, {0, 2}, {1, 2}};  // bowtie
  CHECK_THROWS_AS(capillary_energy(scene), NonSimplePolygon);

  scene.droplet = {{0, 1}, {1, 1}};
  CHECK_THROWS_AS(capillary_energy(scene), DegenerateDroplet);
}

TEST_CASE("edge classification is stable under snap/10 perturbations") {
  Rng rng(77);
  CapillaryScene scene;
  scene.obstacle = slab_obstacle();
  scene.droplet = cap_polygon(0.2, 16);
  scene.lambda = 0.2;
  scene.snap = 1e-7;
  const EnergyBreakdown base = capillary_energy(scene);
  for (int trial = 0; trial < 10; ++trial) {
    CapillaryScene jittered = scene;
    for (auto& v : jittered.droplet) {
      v.x += rng.uniform(-1.0, 1.0) * scene.snap / 10.0;
      // Keep wetted vertices on the support side within snap/10.
      v.y += (std::abs(v.y) < 1e-12 ? rng.uniform(0.0, 1.0) : rng.uniform(-1.0, 1.0)) *
             scene.snap / 10.0;
    }
    const EnergyBreakdown jit = capillary_energy(jittered);
    REQUIRE(jit.edge_wetted.size() == base.edge_wetted.size());
    for (std::size_t i = 0; i < base.edge_wetted.size(); ++i) {
      CHECK(jit.edge_wetted[i] == base.edge_wetted[i]);
    }
  }
}

TEST_CASE("scaling: energy scales linearly, volume quadratically") {
  const WedgeScene w = wedge_scene(0.25, 32);
  const EnergyBreakdown base = capillary_energy(w.scene);
  for (double r : {0.5, 2.0}) {
    CapillaryScene scaled = w.scene;
    // Scale droplet and obstacle about the apex (origin), which is on both.
    for (auto& v : scaled.droplet) v = v * r;
    std::vector<Vec2> overts = w.scene.obstacle.vertices();
    for (auto& v : overts) v = v * r;
    scaled.obstacle = ConvexSection::polygon(overts);
    const EnergyBreakdown e = capillary_energy(scaled);
    CHECK(e.energy == doctest::Approx(r * base.energy).epsilon(1e-10));
    CHECK(e.volume == doctest::Approx(r * r * base.volume).epsilon(1e-10));
    CHECK((e.margin > 0.0) == (base.margin > 0.0));
  }
}

TEST_CASE("random scenes: isoperimetric margin never below -1e-9") {
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    const CapillaryScene scene = random_scene(seed);
    const IsoperimetricReport rep = isoperimetric_check(scene);
    CHECK(!rep.violated);
    CHECK(rep.breakdown.margin >= -1e-9);
  }
}

TEST_CASE("overlap area agrees with a grid oracle on a known case") {
  // Unit square droplet overlapping the slab by a 1 x 0.25 strip.
  const std::vector<Vec2> poly = {{0, -0.25}, {1, -0.25}, {1, 0.75}, {0, 0.75}};
  CHECK(overlap_area(poly, slab_obstacle()) == doctest::Approx(0.25).epsilon(1e-12));

  // Disk obstacle: square centered at origin vs unit disk.
  const std::vector<Vec2> square = {{-2, -2}, {2, -2}, {2, 2}, {-2, 2}};
  CHECK(overlap_area(square, ConvexSection::disk(1.0)) ==
        doctest::Approx(kPi).epsilon(1e-9));
}
