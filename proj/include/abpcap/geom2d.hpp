#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "abpcap/constants.hpp"

// Exact planar primitives: half-planes, convex cells in H-representation,
// circle arc sets, and measures of their intersections with disks. All types
// are immutable values after construction and every operation is pure.

namespace abpcap {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double px, double py) : x(px), y(py) {}

  constexpr Vec2 operator+(Vec2 r) const { return {x + r.x, y + r.y}; }
  constexpr Vec2 operator-(Vec2 r) const { return {x - r.x, y - r.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }

  constexpr double dot(Vec2 r) const { return x * r.x + y * r.y; }
  constexpr double cross(Vec2 r) const { return x * r.y - y * r.x; }
  double norm() const { return std::hypot(x, y); }
  constexpr double norm2() const { return x * x + y * y; }

  Vec2 normalized() const {
    const double n = norm();
    return {x / n, y / n};
  }
  // Counterclockwise quarter turn.
  constexpr Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline Vec2 unit_from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }

class GeomError : public std::runtime_error {
 public:
  explicit GeomError(const std::string& what) : std::runtime_error(what) {}
};

class InvalidLambda : public GeomError {
 public:
  explicit InvalidLambda(double lambda)
      : GeomError("lambda out of (-1, 1): " + std::to_string(lambda)) {}
};

class EmptyArcSet : public GeomError {
 public:
  EmptyArcSet() : GeomError("operation requires a nonempty arc set") {}
};

// Open half-plane {z : z . normal > offset} with |normal| = 1.
struct HalfPlane {
  Vec2 normal;
  double offset = 0.0;

  HalfPlane() = default;
  HalfPlane(Vec2 n, double c) : normal(n), offset(c) {}

  double signed_excess(Vec2 z) const { return z.dot(normal) - offset; }
};

// Disjoint angle intervals on the circle of a fixed radius. Canonical form:
// starts in [0, 2pi), end > start, end <= 2pi (wrap-around arcs are split in
// two records at 0), sorted by start, zero-length arcs dropped.
class ArcSet {
 public:
  explicit ArcSet(double radius) : radius_(radius) {}

  static ArcSet full(double radius);
  static ArcSet empty_set(double radius) { return ArcSet(radius); }
  // Builds the canonical form from one (possibly wrapping) interval.
  static ArcSet from_interval(double radius, double start, double end);

  double radius() const { return radius_; }
  const std::vector<std::pair<double, double>>& arcs() const { return arcs_; }

  bool empty() const { return arcs_.empty(); }
  bool is_full() const { return total_angle() >= kTwoPi - 1e-12; }

  double total_angle() const;
  double total_length() const { return radius_ * total_angle(); }

  ArcSet intersect(const ArcSet& other) const;

  // Closed membership with angular tolerance (handles the wrap at 0).
  bool contains_angle(double theta, double angle_tol = 0.0) const;

  // Genuine endpoint angles of the maximal closed arcs; empty for the full
  // circle. Pairs touching across 0 or within angle_tol are merged first.
  std::vector<double> boundary_angles(double angle_tol = 1e-12) const;

  // Number of maximal arcs after merging adjacency (full circle counts 1).
  int component_count(double angle_tol = 1e-12) const;

  // Maximal closed arcs as (start, end) with end possibly > 2pi when the
  // arc wraps through 0.
  std::vector<std::pair<double, double>> merged_arcs(double angle_tol = 1e-12) const;

 private:
  double radius_;
  std::vector<std::pair<double, double>> arcs_;
};

// Angular portion of the circle of radius r (centered at the origin) lying
// strictly inside h. Tangent or separated half-planes give the empty set,
// offset <= -r gives the full circle.
ArcSet halfplane_circle_arcs(const HalfPlane& h, double r);

// Convex planar region as an irredundant intersection of half-planes plus a
// cached vertex loop clipped to the box of half-width kBoxHalfWidth. An empty
// `halfplanes` list is the whole plane. Cells whose clipped area falls below
// tol::kEmptyArea are flagged empty.
class ConvexCell {
 public:
  // Whole plane.
  ConvexCell();

  // Canonicalizes: deduplicates parallel constraints, detects infeasibility,
  // prunes constraints whose removal leaves the clipped region unchanged
  // within area tol::kEmptyArea. `sources` optionally tags each input plane
  // with the id of the site that induced it (kept in sync through pruning).
  static ConvexCell from_halfplanes(std::vector<HalfPlane> planes,
                                    std::vector<int> sources = {});

  // Cell with empty interior (e.g. a dominated coincident site).
  static ConvexCell empty_cell();

  bool empty() const { return empty_; }
  const std::vector<HalfPlane>& halfplanes() const { return planes_; }
  const std::vector<int>& sources() const { return sources_; }
  // CCW vertex loop of the cell clipped to the bounding box; empty if the
  // cell is empty. Edges lying on the box are included.
  const std::vector<Vec2>& loop() const { return loop_; }

  double clipped_area() const;
  bool contains(Vec2 z, double slack = 0.0) const;

 private:
  std::vector<HalfPlane> planes_;
  std::vector<int> sources_;
  std::vector<Vec2> loop_;
  bool empty_ = false;
};

// Clip a CCW convex loop by {z . n >= c}; returns the new loop.
std::vector<Vec2> clip_loop(const std::vector<Vec2>& loop, const HalfPlane& h);

// Signed area of a polygon loop (positive for CCW).
double polygon_area(const std::vector<Vec2>& loop);

// Distance from x to the segment [a, b].
double point_segment_distance(Vec2 x, Vec2 a, Vec2 b);

// Intersection of the cell with the circle of radius r.
ArcSet cell_circle_arcs(const ConvexCell& cell, double r);

// Exact area of cell ∩ D_r by the divergence theorem over straight edge
// pieces and circle arcs, with compensated accumulation.
double cell_disk_area(const ConvexCell& cell, double r);

// Area of (cell ∩ h) ∩ D_r without re-canonicalizing the cell.
double cell_halfplane_disk_area(const ConvexCell& cell, const HalfPlane& h, double r);

// Arc set of (cell ∩ h) on the circle of radius r.
ArcSet cell_halfplane_circle_arcs(const ConvexCell& cell, const HalfPlane& h, double r);

// Exact min and max of z . nu over a nonempty arc set.
std::pair<double, double> linear_range_on_arcs(const ArcSet& arcs, Vec2 nu);

// Volume of the scaled spherical cap r * {x in B_1 : x_N > lambda}, i.e.
// r^N * Int_lambda^1 omega_{N-1} (1-t^2)^{(N-1)/2} dt. Closed form for
// N = 2, 3; adaptive quadrature to tol::kCapQuadrature otherwise.
double cap_volume(int dim, double lambda, double r);

// Area of {z in D_r : z . e > offset} for a unit direction e (absolute cut).
double halfplane_disk_area(double r, double offset);

// Compensated (Kahan) accumulator.
class KahanSum {
 public:
  void add(double v) {
    const double y = v - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace abpcap
