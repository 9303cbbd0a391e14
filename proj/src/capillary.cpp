#include "abpcap/capillary.hpp"

#include <algorithm>
#include <cmath>

namespace abpcap {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const auto orient = [](Vec2 p, Vec2 q, Vec2 r) {
    const double v = (q - p).cross(r - p);
    if (v > 1e-14) return 1;
    if (v < -1e-14) return -1;
    return 0;
  };
  const int o1 = orient(a, b, c);
  const int o2 = orient(a, b, d);
  const int o3 = orient(c, d, a);
  const int o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  const auto on = [](Vec2 p, Vec2 q, Vec2 r) {
    return std::min(p.x, q.x) - 1e-14 <= r.x && r.x <= std::max(p.x, q.x) + 1e-14 &&
           std::min(p.y, q.y) - 1e-14 <= r.y && r.y <= std::max(p.y, q.y) + 1e-14;
  };
  if (o1 == 0 && on(a, b, c)) return true;
  if (o2 == 0 && on(a, b, d)) return true;
  if (o3 == 0 && on(c, d, a)) return true;
  if (o4 == 0 && on(c, d, b)) return true;
  return false;
}

std::vector<HalfPlane> obstacle_halfplanes(const std::vector<Vec2>& verts) {
  std::vector<HalfPlane> out;
  const std::size_t n = verts.size();
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = verts[i];
    const Vec2 b = verts[(i + 1) % n];
    const Vec2 inward = (b - a).perp().normalized();  // interior on the left (CCW)
    out.push_back({inward, inward.dot(a)});
  }
  return out;
}

bool point_in_polygon(Vec2 p, const std::vector<Vec2>& poly) {
  bool in = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) &&
        p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
      in = !in;
    }
  }
  return in;
}

// Area of a simple polygon intersected with a disk, by the divergence
// theorem (edge pieces inside the disk plus circle arcs inside the polygon).
double polygon_disk_area(const std::vector<Vec2>& poly_in, Vec2 center, double r) {
  std::vector<Vec2> poly = poly_in;
  for (auto& v : poly) v = v - center;
  KahanSum sum;
  std::vector<double> cut_angles;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p = poly[i];
    const Vec2 q = poly[(i + 1) % n];
    const Vec2 d = q - p;
    const double a = d.norm2();
    if (a == 0.0) continue;
    const double b = 2.0 * p.dot(d);
    const double c = p.norm2() - r * r;
    const double disc = b * b - 4.0 * a * c;
    if (disc <= 0.0) continue;
    const double sq = std::sqrt(disc);
    const double t1 = (-b - sq) / (2.0 * a);
    const double t2 = (-b + sq) / (2.0 * a);
    const double lo = std::max(0.0, t1);
    const double hi = std::min(1.0, t2);
    if (hi > lo) {
      const Vec2 p1 = p + d * lo;
      const Vec2 p2 = p + d * hi;
      sum.add(p1.cross(p2));
    }
    for (double t : {t1, t2}) {
      if (t >= 0.0 && t <= 1.0) {
        const Vec2 z = p + d * t;
        cut_angles.push_back(std::atan2(z.y, z.x));
      }
    }
  }
  double area = 0.5 * sum.value();
  if (cut_angles.empty()) {
    // Circle entirely inside or outside the polygon.
    if (point_in_polygon({r, 0.0}, poly)) area += kPi * r * r;
    return std::clamp(area, 0.0, kPi * r * r);
  }
  std::sort(cut_angles.begin(), cut_angles.end());
  cut_angles.push_back(cut_angles.front() + kTwoPi);
  for (std::size_t k = 0; k + 1 < cut_angles.size(); ++k) {
    const double th1 = cut_angles[k];
    const double th2 = cut_angles[k + 1];
    if (th2 - th1 < 1e-14) continue;
    const double mid = 0.5 * (th1 + th2);
    if (point_in_polygon({r * std::cos(mid), r * std::sin(mid)}, poly)) {
      area += 0.5 * r * r * (th2 - th1);
    }
  }
  return std::clamp(area, 0.0, kPi * r * r);
}

}  // namespace

bool polygon_simple(const std::vector<Vec2>& polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = polygon[i];
    const Vec2 b = polygon[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      // Skip adjacent edges (sharing a vertex).
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_intersect(a, b, polygon[j], polygon[(j + 1) % n])) return false;
    }
  }
  return true;
}

double overlap_area(const std::vector<Vec2>& polygon, const ConvexSection& obstacle) {
  if (obstacle.kind() == ConvexSection::Kind::disk) {
    return polygon_disk_area(polygon, obstacle.disk_center(), obstacle.disk_radius());
  }
  std::vector<Vec2> clipped = polygon;
  if (polygon_area(clipped) < 0.0) std::reverse(clipped.begin(), clipped.end());
  for (const HalfPlane& h : obstacle_halfplanes(obstacle.vertices())) {
    clipped = clip_loop(clipped, h);
    if (clipped.size() < 3) return 0.0;
  }
  return std::max(0.0, polygon_area(clipped));
}

double reference_energy(int dim, double lambda, double volume) {
  if (!(volume > 0.0)) throw InvalidVolume("volume must be positive");
  const double c0 = cap_volume(dim, lambda, 1.0);
  const double r = std::pow(volume / c0, 1.0 / dim);
  return dim * c0 * std::pow(r, dim - 1);
}

EnergyBreakdown capillary_energy(const CapillaryScene& scene) {
  if (!(std::abs(scene.lambda) < 1.0)) throw InvalidLambda(scene.lambda);
  const std::vector<Vec2>& droplet = scene.droplet;
  if (droplet.size() < 3) throw DegenerateDroplet();
  if (!polygon_simple(droplet)) throw NonSimplePolygon();
  // Orientation-free: edges are classified in the given order, the volume is
  // the unsigned shoelace area.
  const double area = std::abs(polygon_area(droplet));
  if (area <= tol::kEmptyArea) throw DegenerateDroplet();

  const double overlap = overlap_area(droplet, scene.obstacle);
  if (overlap > 1e-9) throw OverlappingScene(overlap);

  EnergyBreakdown out;
  out.volume = area;
  KahanSum free_sum;
  KahanSum wet_sum;
  const std::size_t n = droplet.size();
  out.edge_wetted.resize(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = droplet[i];
    const Vec2 b = droplet[(i + 1) % n];
    const Vec2 mid = (a + b) * 0.5;
    const bool wet = scene.obstacle.distance_to_boundary(a) <= scene.snap &&
                     scene.obstacle.distance_to_boundary(b) <= scene.snap &&
                     scene.obstacle.distance_to_boundary(mid) <= scene.snap;
    out.edge_wetted[i] = wet;
    const double len = (b - a).norm();
    if (wet) {
      wet_sum.add(len);
    } else {
      free_sum.add(len);
    }
  }
  out.free_perimeter = free_sum.value();
  out.wetted = wet_sum.value();
  out.energy = out.free_perimeter - scene.lambda * out.wetted;
  out.reference = reference_energy(2, scene.lambda, out.volume);
  out.margin = out.energy - out.reference;
  return out;
}

IsoperimetricReport isoperimetric_check(const CapillaryScene& scene) {
  IsoperimetricReport rep;
  rep.breakdown = capillary_energy(scene);
  rep.violated = rep.breakdown.margin < -tol::kMeasure;
  return rep;
}

bool strict_concavity_probe(int dim, double lambda, double v, double v1) {
  if (!(v1 > 0.0) || !(v1 < v)) throw InvalidVolume("need 0 < v1 < v");
  return reference_energy(dim, lambda, v1) + reference_energy(dim, lambda, v - v1) >
         reference_energy(dim, lambda, v) + 1e-12;
}

// ---------------------------------------------------------------------------
// Fixtures

std::vector<Vec2> cap_polygon(double lambda, int arc_segments) {
  std::vector<Vec2> pts;
  const double th0 = std::asin(std::clamp(lambda, -1.0, 1.0));
  const double th1 = kPi - th0;
  pts.reserve(arc_segments + 1);
  for (int k = 0; k <= arc_segments; ++k) {
    const double th = th0 + (th1 - th0) * k / arc_segments;
    pts.push_back({std::cos(th), std::sin(th) - lambda});
  }
  // Pin the chord ends exactly onto {y = 0}.
  pts.front().y = 0.0;
  pts.back().y = 0.0;
  return pts;
}

WedgeScene wedge_scene(double lambda, int arc_segments) {
  WedgeScene out;
  out.scene.obstacle = ConvexSection::polygon({{0, 0}, {-2, -2}, {2, -2}});
  out.scene.lambda = lambda;
  const double a = 0.5;
  const double c = 0.3;
  const double rho = std::sqrt(a * a + (a + c) * (a + c));
  const Vec2 center{0.0, c};
  const double th_r = std::atan2(-a - c, a);
  const double th_l = std::atan2(-a - c, -a);  // reach it going CCW from th_r
  const double th_l_unwrapped = th_l > th_r ? th_l : th_l + kTwoPi;
  std::vector<Vec2> poly;
  poly.push_back({-a, -a});
  poly.push_back({0.0, 0.0});
  poly.push_back({a, -a});
  for (int k = 1; k < arc_segments; ++k) {
    const double th = th_r + (th_l_unwrapped - th_r) * k / arc_segments;
    poly.push_back(center + unit_from_angle(th) * rho);
  }
  out.scene.droplet = std::move(poly);
  out.ridge_span = a;
  return out;
}

CapillaryScene random_scene(std::uint64_t seed) {
  Rng rng(seed);
  CapillaryScene scene;
  scene.obstacle = random_convex_polygon(rng);
  scene.lambda = rng.uniform(-0.95, 0.95);
  const auto& verts = scene.obstacle.vertices();
  const std::size_t nv = verts.size();

  const double kind = rng.uniform();
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<Vec2> droplet;
    if (kind < 0.4) {
      // Floating star-shaped droplet fully clear of the obstacle.
      const Vec2 dir = unit_from_angle(rng.uniform(0.0, kTwoPi));
      double support = -1e300;
      for (const Vec2& v : verts) support = std::max(support, v.dot(dir));
      const double max_r = rng.uniform(0.4, 1.2);
      const Vec2 center = dir * (support + max_r + 0.1);
      const int m = static_cast<int>(rng.uniform_int(3, 12));
      std::vector<double> angles(m);
      for (auto& t : angles) t = rng.uniform(0.0, kTwoPi);
      std::sort(angles.begin(), angles.end());
      bool distinct = true;
      for (int i = 0; i + 1 < m; ++i) {
        if (angles[i + 1] - angles[i] < 1e-3) distinct = false;
      }
      if (!distinct) continue;
      for (double t : angles) {
        droplet.push_back(center + unit_from_angle(t) * rng.uniform(0.15, max_r));
      }
    } else if (kind < 0.75) {
      // Droplet resting on one facet, wetting part of it.
      const std::size_t e = static_cast<std::size_t>(rng.uniform_int(0, nv - 1));
      const Vec2 va = verts[e];
      const Vec2 vb = verts[(e + 1) % nv];
      const Vec2 t = (vb - va).normalized();
      const Vec2 n = -t.perp();  // outward for CCW polygons
      const double len = (vb - va).norm();
      const double s0 = rng.uniform(0.05, 0.45) * len;
      const double s1 = rng.uniform(0.55, 0.95) * len;
      const Vec2 p = va + t * s0;
      const Vec2 q = va + t * s1;
      droplet.push_back(p);
      droplet.push_back(q);
      const int m = static_cast<int>(rng.uniform_int(2, 8));
      for (int k = 1; k <= m; ++k) {
        const double frac = static_cast<double>(k) / (m + 1);
        const Vec2 base = q + (p - q) * frac;
        droplet.push_back(base + n * rng.uniform(0.15, 1.2));
      }
    } else {
      // Droplet wetting both facets around a vertex.
      const std::size_t k = static_cast<std::size_t>(rng.uniform_int(0, nv - 1));
      const Vec2 w = verts[k];
      const Vec2 prev = verts[(k + nv - 1) % nv];
      const Vec2 next = verts[(k + 1) % nv];
      const double a =
          rng.uniform(0.1, 0.4) * std::min((w - prev).norm(), (next - w).norm());
      const Vec2 l_pt = w + (prev - w).normalized() * a;
      const Vec2 r_pt = w + (next - w).normalized() * a;
      const Vec2 n_prev = -(w - prev).normalized().perp();
      const Vec2 n_next = -(next - w).normalized().perp();
      const Vec2 nu_mid = (n_prev + n_next).normalized();
      const Vec2 roof = w + nu_mid * rng.uniform(0.5, 1.5);
      droplet = {l_pt, w, r_pt, roof};
    }
    if (!polygon_simple(droplet)) continue;
    if (polygon_area(droplet) < 0.0) std::reverse(droplet.begin(), droplet.end());
    if (polygon_area(droplet) <= 1e-6) continue;
    if (overlap_area(droplet, scene.obstacle) > 1e-9) continue;
    scene.droplet = std::move(droplet);
    return scene;
  }
  // Fallback: a guaranteed floating square far away.
  double top = -1e300;
  for (const Vec2& v : verts) top = std::max(top, v.y);
  scene.droplet = {{-0.5, top + 1.0}, {0.5, top + 1.0}, {0.5, top + 2.0}, {-0.5, top + 2.0}};
  return scene;
}

}  // namespace abpcap
