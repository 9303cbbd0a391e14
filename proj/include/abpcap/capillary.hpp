#pragma once

#include <vector>

#include "abpcap/convexbody.hpp"
#include "abpcap/geom2d.hpp"

// Capillary energy of planar polygonal droplets outside convex obstacles:
// J = free perimeter - lambda * wetted length, compared with the
// spherical-cap reference of the same volume.

namespace abpcap {

class OverlappingScene : public GeomError {
 public:
  explicit OverlappingScene(double overlap)
      : GeomError("droplet overlaps the obstacle interior (area " +
                  std::to_string(overlap) + ")") {}
};

class DegenerateDroplet : public GeomError {
 public:
  DegenerateDroplet() : GeomError("droplet area is below tolerance") {}
};

class NonSimplePolygon : public GeomError {
 public:
  NonSimplePolygon() : GeomError("polygon has self-intersections") {}
};

class InvalidVolume : public GeomError {
 public:
  explicit InvalidVolume(const std::string& what) : GeomError(what) {}
};

struct CapillaryScene {
  ConvexSection obstacle;
  std::vector<Vec2> droplet;  // simple polygon, either orientation
  double lambda = 0.0;
  double snap = tol::kSnapDefault;  // wetted-edge classification tolerance
};

struct EnergyBreakdown {
  double free_perimeter = 0.0;  // P(E; R^2 \ C)
  double wetted = 0.0;          // H^1(boundary E on boundary C)
  double energy = 0.0;          // J = free - lambda * wetted
  double volume = 0.0;          // |E|
  double reference = 0.0;       // J_{lambda,H}(B^lambda[v])
  double margin = 0.0;          // energy - reference
  std::vector<bool> edge_wetted;  // per droplet edge (i -> i+1)
};

// Classifies each droplet edge (both endpoints and midpoint within snap of
// the obstacle boundary -> wetted), accumulates lengths exactly, volume by
// the shoelace formula, and fills the cap reference.
EnergyBreakdown capillary_energy(const CapillaryScene& scene);

// N c0 r^{N-1} with c0 = cap_volume(N, lambda, 1) and r = (v / c0)^{1/N}.
double reference_energy(int dim, double lambda, double volume);

struct IsoperimetricReport {
  EnergyBreakdown breakdown;
  bool violated = false;  // margin < -tol::kMeasure (would indicate a bug)
};

IsoperimetricReport isoperimetric_check(const CapillaryScene& scene);

// Whether splitting volume v into (v1, v - v1) strictly raises the total
// reference energy (strict concavity of the isoperimetric function).
bool strict_concavity_probe(int dim, double lambda, double v, double v1);

// True if the polygon has no self-intersections.
bool polygon_simple(const std::vector<Vec2>& polygon);

// Area of polygon ∩ obstacle (Sutherland-Hodgman against the convex body).
double overlap_area(const std::vector<Vec2>& polygon, const ConvexSection& obstacle);

// --- scene fixtures used by tests and the fuzzer -------------------------

// Polygonal spherical cap of unit radius resting flat on {y = 0}: arc points
// above level `lambda` of the circle centered at (0, -lambda), plus the two
// chord corners; k arc segments, CCW.
std::vector<Vec2> cap_polygon(double lambda, int arc_segments);

// Droplet wetting both facets of a wedge-shaped obstacle near its apex.
struct WedgeScene {
  CapillaryScene scene;
  double ridge_span = 0.0;  // wetted extent on each facet
};
WedgeScene wedge_scene(double lambda, int arc_segments);

// Random droplet/obstacle scene generator (floating, facet-sitting, or
// vertex-wetting droplets, all outside the obstacle by construction).
CapillaryScene random_scene(std::uint64_t seed);

}  // namespace abpcap
