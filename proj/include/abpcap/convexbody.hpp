#pragma once

#include <optional>
#include <string>
#include <vector>

#include "abpcap/geom2d.hpp"
#include "abpcap/rng.hpp"

// The planar convex section C and contact configurations (points on its
// boundary, outward normals, values) feeding the partition machinery.

namespace abpcap {

class NotOnBoundary : public GeomError {
 public:
  NotOnBoundary() : GeomError("query point is not on the body boundary") {}
};

class InvalidBody : public GeomError {
 public:
  explicit InvalidBody(const std::string& what) : GeomError(what) {}
};

// A closed planar convex body with nonempty interior.
class ConvexSection {
 public:
  enum class Kind { polygon, disk, support_sampled };

  // CCW convex vertex list.
  static ConvexSection polygon(std::vector<Vec2> vertices);
  static ConvexSection disk(double radius, Vec2 center = {0.0, 0.0});
  // Pairs (direction, support value); the body is the intersection of the
  // supporting half-planes {z . dir <= s}.
  static ConvexSection support_sampled(std::vector<std::pair<Vec2, double>> samples);

  Kind kind() const { return kind_; }
  double disk_radius() const { return radius_; }
  Vec2 disk_center() const { return center_; }
  // Materialized CCW boundary polygon (for disk bodies this is empty; use
  // the analytic routines).
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::pair<Vec2, double>>& support_samples() const {
    return samples_;
  }

  double boundary_length() const;
  double distance_to_boundary(Vec2 x) const;
  // Outward unit normal of a supporting line at the boundary point nearest
  // to x; at polygon vertices, the angular midpoint of the normal cone.
  // Throws NotOnBoundary if dist(x, boundary) > tol::kBoundaryQuery.
  Vec2 boundary_normal(Vec2 x) const;
  // Point and outward normal at arc-length parameter s in [0, L).
  std::pair<Vec2, Vec2> point_at_arclength(double s) const;
  // Normal cone [n_lo, n_hi] at a polygon vertex index (edge normals of the
  // two incident edges). Only meaningful for polygon-backed bodies.
  std::pair<Vec2, Vec2> vertex_normal_cone(std::size_t vertex_index) const;

 private:
  Kind kind_ = Kind::disk;
  double radius_ = 1.0;
  Vec2 center_;
  std::vector<Vec2> vertices_;
  std::vector<std::pair<Vec2, double>> samples_;
};

// Finite boundary data: points x_i, outward unit normals nu_i, values v(x_i).
struct ContactConfig {
  std::vector<Vec2> points;
  std::vector<Vec2> normals;
  std::vector<double> values;
  std::optional<ConvexSection> source;

  std::size_t size() const { return points.size(); }
};

// Contact data on the cylinder C x R^{N-2}: planar points with heights.
struct CylinderContactConfig {
  ContactConfig planar;                     // points p_i on the section boundary
  std::vector<std::vector<double>> heights; // h_i in R^{N-2}
  std::vector<double> values;               // v(p_i, h_i)
  int ambient_codim = 1;                    // N - 2
};

struct ValidationIssue {
  std::string rule;
  int index_i = -1;
  int index_j = -1;
  double magnitude = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

// Checks unit normals, the supporting condition nu_i . (x_j - x_i) <= tol,
// and consistency with the source body when present. Diagnostics only.
ValidationReport validate_contact_config(const ContactConfig& cfg);

ValidationReport validate_cylinder_config(const CylinderContactConfig& cfg);

// n points uniform by boundary arc length with outward normals and zero
// values; exact polygon-vertex hits are perturbed into the edge interior.
// Deterministic given the seed.
ContactConfig sample_boundary(const ConvexSection& body, int n, std::uint64_t seed);

// Random convex polygon: hull of points drawn around a random center.
ConvexSection random_convex_polygon(Rng& rng);

}  // namespace abpcap
