#include "abpcap/convexbody.hpp"

#include <algorithm>
#include <cmath>

namespace abpcap {

ConvexSection ConvexSection::polygon(std::vector<Vec2> vertices) {
  if (vertices.size() < 3) throw InvalidBody("polygon needs at least 3 vertices");
  const double area = polygon_area(vertices);
  if (area <= tol::kEmptyArea) throw InvalidBody("polygon has empty interior");
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices[i];
    const Vec2 b = vertices[(i + 1) % n];
    const Vec2 c = vertices[(i + 2) % n];
    if ((b - a).cross(c - b) < -tol::kUnitNormal) {
      throw InvalidBody("polygon is not convex (CCW cross product negative)");
    }
  }
  ConvexSection s;
  s.kind_ = Kind::polygon;
  s.vertices_ = std::move(vertices);
  return s;
}

ConvexSection ConvexSection::disk(double radius, Vec2 center) {
  if (!(radius > 0.0)) throw InvalidBody("disk radius must be positive");
  ConvexSection s;
  s.kind_ = Kind::disk;
  s.radius_ = radius;
  s.center_ = center;
  return s;
}

ConvexSection ConvexSection::support_sampled(
    std::vector<std::pair<Vec2, double>> samples) {
  if (samples.size() < 3) throw InvalidBody("need at least 3 support samples");
  // {z . dir <= s}  <=>  {z . (-dir) >= -s}
  std::vector<HalfPlane> planes;
  planes.reserve(samples.size());
  for (const auto& [dir, s] : samples) {
    planes.push_back({(-dir).normalized(), -s});
  }
  const ConvexCell cell = ConvexCell::from_halfplanes(planes);
  if (cell.empty()) throw InvalidBody("support samples induce an empty body");
  ConvexSection s;
  s.kind_ = Kind::support_sampled;
  s.samples_ = std::move(samples);
  s.vertices_ = cell.loop();
  if (polygon_area(s.vertices_) <= tol::kEmptyArea) {
    throw InvalidBody("support samples induce a degenerate body");
  }
  return s;
}

double ConvexSection::boundary_length() const {
  if (kind_ == Kind::disk) return kTwoPi * radius_;
  KahanSum sum;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    sum.add((vertices_[(i + 1) % n] - vertices_[i]).norm());
  }
  return sum.value();
}

double ConvexSection::distance_to_boundary(Vec2 x) const {
  if (kind_ == Kind::disk) return std::abs((x - center_).norm() - radius_);
  double best = 1e300;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    best = std::min(best, point_segment_distance(x, vertices_[i], vertices_[(i + 1) % n]));
  }
  return best;
}

std::pair<Vec2, Vec2> ConvexSection::vertex_normal_cone(std::size_t k) const {
  const std::size_t n = vertices_.size();
  const Vec2 prev = vertices_[(k + n - 1) % n];
  const Vec2 cur = vertices_[k];
  const Vec2 next = vertices_[(k + 1) % n];
  // Outward normal of a CCW polygon edge is the clockwise perpendicular.
  const Vec2 n_in = (-(cur - prev).perp()).normalized();
  const Vec2 n_out = (-(next - cur).perp()).normalized();
  return {n_in, n_out};
}

Vec2 ConvexSection::boundary_normal(Vec2 x) const {
  if (distance_to_boundary(x) > tol::kBoundaryQuery) throw NotOnBoundary();
  if (kind_ == Kind::disk) return (x - center_).normalized();

  const std::size_t n = vertices_.size();
  double best = 1e300;
  std::size_t best_edge = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = point_segment_distance(x, vertices_[i], vertices_[(i + 1) % n]);
    if (d < best) {
      best = d;
      best_edge = i;
    }
  }
  const Vec2 a = vertices_[best_edge];
  const Vec2 b = vertices_[(best_edge + 1) % n];
  const Vec2 d = b - a;
  const double t = std::clamp((x - a).dot(d) / d.norm2(), 0.0, 1.0);
  const double vertex_snap = 1e-9;
  if (t * d.norm() < vertex_snap) {
    const auto [lo, hi] = vertex_normal_cone(best_edge);
    return (lo + hi).normalized();
  }
  if ((1.0 - t) * d.norm() < vertex_snap) {
    const auto [lo, hi] = vertex_normal_cone((best_edge + 1) % n);
    return (lo + hi).normalized();
  }
  return (-d.perp()).normalized();
}

std::pair<Vec2, Vec2> ConvexSection::point_at_arclength(double s) const {
  if (kind_ == Kind::disk) {
    const double theta = s / radius_;
    const Vec2 nu = unit_from_angle(theta);
    return {center_ + nu * radius_, nu};
  }
  const std::size_t n = vertices_.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices_[i];
    const Vec2 b = vertices_[(i + 1) % n];
    const double len = (b - a).norm();
    if (s <= acc + len || i + 1 == n) {
      const double t = std::clamp((s - acc) / len, 0.0, 1.0);
      return {a + (b - a) * t, (-(b - a).perp()).normalized()};
    }
    acc += len;
  }
  return {vertices_[0], (-(vertices_[1] - vertices_[0]).perp()).normalized()};
}

ValidationReport validate_contact_config(const ContactConfig& cfg) {
  ValidationReport rep;
  const int n = static_cast<int>(cfg.size());
  if (static_cast<int>(cfg.normals.size()) != n ||
      static_cast<int>(cfg.values.size()) != n) {
    rep.issues.push_back({"field_lengths", -1, -1,
                          static_cast<double>(cfg.normals.size()),
                          "points/normals/values lengths differ"});
    return rep;
  }
  if (n == 0) {
    rep.issues.push_back({"empty", -1, -1, 0.0, "configuration has no points"});
    return rep;
  }
  for (int i = 0; i < n; ++i) {
    const double err = std::abs(cfg.normals[i].norm() - 1.0);
    if (err > tol::kUnitNormal) {
      rep.issues.push_back({"unit_normal", i, -1, err, "normal is not unit length"});
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double s = cfg.normals[i].dot(cfg.points[j] - cfg.points[i]);
      if (s > tol::kSupporting) {
        rep.issues.push_back(
            {"supporting", i, j, s, "nu_i . (x_j - x_i) exceeds tolerance"});
      }
    }
  }
  if (cfg.source.has_value()) {
    for (int i = 0; i < n; ++i) {
      const double d = cfg.source->distance_to_boundary(cfg.points[i]);
      if (d > tol::kOnBoundary) {
        rep.issues.push_back({"on_boundary", i, -1, d,
                              "point is not on the source boundary"});
        continue;
      }
      // nu_i must be an outward normal of a supporting line at x_i: every
      // polygon vertex (or the whole disk) must lie on its inner side.
      double worst = 0.0;
      if (cfg.source->kind() == ConvexSection::Kind::disk) {
        const Vec2 radial = (cfg.points[i] - cfg.source->disk_center()).normalized();
        worst = 1.0 - cfg.normals[i].dot(radial);
      } else {
        for (const Vec2& y : cfg.source->vertices()) {
          worst = std::max(worst, cfg.normals[i].dot(y - cfg.points[i]));
        }
      }
      if (worst > tol::kSupporting) {
        rep.issues.push_back({"outward_normal", i, -1, worst,
                              "normal is not supporting at the contact point"});
      }
    }
  }
  return rep;
}

ValidationReport validate_cylinder_config(const CylinderContactConfig& cfg) {
  ValidationReport rep = validate_contact_config(cfg.planar);
  const std::size_t n = cfg.planar.size();
  if (cfg.heights.size() != n || cfg.values.size() != n) {
    rep.issues.push_back({"field_lengths", -1, -1, 0.0,
                          "heights/values lengths differ from planar points"});
    return rep;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<int>(cfg.heights[i].size()) != cfg.ambient_codim) {
      rep.issues.push_back({"height_dim", static_cast<int>(i), -1,
                            static_cast<double>(cfg.heights[i].size()),
                            "height vector has wrong dimension"});
    }
  }
  return rep;
}

ConvexSection random_convex_polygon(Rng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const int m = static_cast<int>(rng.uniform_int(3, 10));
    std::vector<double> angles(m);
    for (auto& a : angles) a = rng.uniform(0.0, kTwoPi);
    std::sort(angles.begin(), angles.end());
    const Vec2 center{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    std::vector<Vec2> pts;
    pts.reserve(m);
    for (double a : angles) {
      pts.push_back(center + unit_from_angle(a) * rng.uniform(0.4, 2.5));
    }
    // Monotone-chain convex hull.
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
      return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    std::vector<Vec2> hull;
    auto build_half = [&](auto begin, auto end) {
      std::size_t base = hull.size();
      for (auto it = begin; it != end; ++it) {
        while (hull.size() >= base + 2 &&
               (hull[hull.size() - 1] - hull[hull.size() - 2])
                       .cross(*it - hull[hull.size() - 1]) <= 1e-12) {
          hull.pop_back();
        }
        hull.push_back(*it);
      }
      hull.pop_back();
    };
    build_half(pts.begin(), pts.end());
    build_half(pts.rbegin(), pts.rend());
    if (hull.size() >= 3 && polygon_area(hull) > 1e-6) {
      return ConvexSection::polygon(hull);
    }
  }
  return ConvexSection::disk(1.0);
}

ContactConfig sample_boundary(const ConvexSection& body, int n, std::uint64_t seed) {
  ContactConfig cfg;
  cfg.source = body;
  Rng rng(seed);
  const double total = body.boundary_length();
  for (int i = 0; i < n; ++i) {
    double s = rng.uniform(0.0, total);
    if (body.kind() != ConvexSection::Kind::disk) {
      // Nudge exact vertex hits into the adjacent edge interior.
      double acc = 0.0;
      const auto& verts = body.vertices();
      const std::size_t m = verts.size();
      for (std::size_t k = 0; k < m; ++k) {
        const double len = (verts[(k + 1) % m] - verts[k]).norm();
        if (std::abs(s - acc) < 1e-12) s = acc + std::min(1e-9, 0.5 * len);
        acc += len;
      }
    }
    const auto [p, nu] = body.point_at_arclength(s);
    cfg.points.push_back(p);
    cfg.normals.push_back(nu);
    cfg.values.push_back(0.0);
  }
  return cfg;
}

}  // namespace abpcap
