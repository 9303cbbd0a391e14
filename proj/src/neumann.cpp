#include "abpcap/neumann.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>

#include "abpcap/capillary.hpp"

namespace abpcap {

namespace {

constexpr double kPi = 3.14159265358979323846;

double triangle_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * (b - a).cross(c - a); }

double triangle_min_angle(Vec2 a, Vec2 b, Vec2 c) {
  const double la = (b - c).norm();
  const double lb = (a - c).norm();
  const double lc = (a - b).norm();
  auto angle = [](double opp, double s1, double s2) {
    return std::acos(std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2), -1.0, 1.0));
  };
  return std::min({angle(la, lb, lc), angle(lb, la, lc), angle(lc, la, lb)});
}

using Tri = std::array<int, 3>;
using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

struct WorkMesh {
  std::vector<Vec2> v;
  std::vector<Tri> tris;
  std::map<EdgeKey, bool> boundary;  // edge -> wetted
};

// --- ear clipping -----------------------------------------------------------

std::vector<Tri> ear_clip(const std::vector<Vec2>& poly) {
  const int n = static_cast<int>(poly.size());
  std::vector<int> ring(n);
  for (int i = 0; i < n; ++i) ring[i] = i;
  std::vector<Tri> out;
  out.reserve(n - 2);

  auto inside_tri = [&](Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
    const double d1 = (b - a).cross(p - a);
    const double d2 = (c - b).cross(p - b);
    const double d3 = (a - c).cross(p - c);
    return d1 > 1e-14 && d2 > 1e-14 && d3 > 1e-14;
  };

  int guard = 0;
  while (ring.size() > 3) {
    const int m = static_cast<int>(ring.size());
    bool clipped = false;
    for (int k = 0; k < m; ++k) {
      const int ia = ring[(k + m - 1) % m];
      const int ib = ring[k];
      const int ic = ring[(k + 1) % m];
      const Vec2 a = poly[ia];
      const Vec2 b = poly[ib];
      const Vec2 c = poly[ic];
      if ((b - a).cross(c - b) <= 1e-14) continue;  // reflex or collinear
      bool blocked = false;
      for (int j = 0; j < m && !blocked; ++j) {
        const int idx = ring[j];
        if (idx == ia || idx == ib || idx == ic) continue;
        if (inside_tri(poly[idx], a, b, c)) blocked = true;
      }
      if (blocked) continue;
      out.push_back({ia, ib, ic});
      ring.erase(ring.begin() + k);
      clipped = true;
      break;
    }
    if (!clipped) {
      // Tolerate collinear corners: drop the flattest vertex.
      int best = 0;
      double best_cross = 1e300;
      for (int k = 0; k < m; ++k) {
        const Vec2 a = poly[ring[(k + m - 1) % m]];
        const Vec2 b = poly[ring[k]];
        const Vec2 c = poly[ring[(k + 1) % m]];
        const double cr = std::abs((b - a).cross(c - b));
        if (cr < best_cross) {
          best_cross = cr;
          best = k;
        }
      }
      const int ia = ring[(best + m - 1) % m];
      const int ib = ring[best];
      const int ic = ring[(best + 1) % m];
      if (triangle_area(poly[ia], poly[ib], poly[ic]) > 1e-14) {
        out.push_back({ia, ib, ic});
      }
      ring.erase(ring.begin() + best);
    }
    if (++guard > 4 * n) throw GeomError("ear clipping failed to terminate");
  }
  if (triangle_area(poly[ring[0]], poly[ring[1]], poly[ring[2]]) > 1e-14) {
    out.push_back({ring[0], ring[1], ring[2]});
  }
  return out;
}

// --- refinement -------------------------------------------------------------

std::vector<int> tris_with_edge(const WorkMesh& m, int a, int b) {
  std::vector<int> out;
  for (int t = 0; t < static_cast<int>(m.tris.size()); ++t) {
    int hits = 0;
    for (int k = 0; k < 3; ++k) {
      if (m.tris[t][k] == a || m.tris[t][k] == b) ++hits;
    }
    if (hits == 2) out.push_back(t);
  }
  return out;
}

EdgeKey longest_edge(const WorkMesh& m, const Tri& t) {
  double best = -1.0;
  EdgeKey key{0, 0};
  for (int k = 0; k < 3; ++k) {
    const int a = t[k];
    const int b = t[(k + 1) % 3];
    const double len = (m.v[a] - m.v[b]).norm();
    // Deterministic tie-break on the key.
    if (len > best + 1e-15 ||
        (std::abs(len - best) <= 1e-15 && edge_key(a, b) < key)) {
      best = len;
      key = edge_key(a, b);
    }
  }
  return key;
}

// Longest-edge (Rivara) bisection with an explicit propagation stack. The
// chain visits edges of strictly increasing (length, tie-key) rank, so it
// terminates within the edge count.
void split_edge(WorkMesh& m, int a0, int b0, int /*depth*/) {
  std::vector<EdgeKey> stack;
  stack.push_back(edge_key(a0, b0));
  std::size_t guard = 0;
  const std::size_t guard_max = 16 * m.tris.size() + 1024;
  while (!stack.empty()) {
    if (++guard > guard_max) throw GeomError("edge bisection failed to terminate");
    const EdgeKey cur = stack.back();
    const int a = cur.first;
    const int b = cur.second;
    const std::vector<int> adj = tris_with_edge(m, a, b);
    if (adj.empty()) {
      stack.pop_back();
      continue;
    }
    bool stable = true;
    for (int t : adj) {
      const EdgeKey le = longest_edge(m, m.tris[t]);
      if (le != cur) {
        stack.push_back(le);
        stable = false;
        break;
      }
    }
    if (!stable) continue;

    const int mid = static_cast<int>(m.v.size());
    m.v.push_back((m.v[a] + m.v[b]) * 0.5);
    const auto bit = m.boundary.find(cur);
    if (bit != m.boundary.end()) {
      const bool wet = bit->second;
      m.boundary.erase(bit);
      m.boundary[edge_key(a, mid)] = wet;
      m.boundary[edge_key(mid, b)] = wet;
    }
    for (int t : adj) {
      const Tri tri = m.tris[t];
      // Preserve orientation: replace the edge (a, b) within the cycle.
      Tri t1 = tri;
      Tri t2 = tri;
      for (int k = 0; k < 3; ++k) {
        if (t1[k] == b) t1[k] = mid;
        if (t2[k] == a) t2[k] = mid;
      }
      m.tris[t] = t1;
      m.tris.push_back(t2);
    }
    stack.pop_back();
  }
}

struct EdgeUse {
  int tri = -1;
  int opposite = -1;  // vertex of tri not on the edge
};

void delaunay_flips(WorkMesh& m) {
  for (int pass = 0; pass < 400; ++pass) {
    std::map<EdgeKey, std::vector<EdgeUse>> edges;
    for (int t = 0; t < static_cast<int>(m.tris.size()); ++t) {
      for (int k = 0; k < 3; ++k) {
        const int a = m.tris[t][k];
        const int b = m.tris[t][(k + 1) % 3];
        const int c = m.tris[t][(k + 2) % 3];
        edges[edge_key(a, b)].push_back({t, c});
      }
    }
    // Flip every non-Delaunay interior edge whose triangles are still
    // untouched in this pass; repeat with a fresh edge map until stable.
    std::vector<bool> dirty(m.tris.size(), false);
    int flips = 0;
    for (const auto& [key, uses] : edges) {
      if (uses.size() != 2) continue;
      if (m.boundary.count(key)) continue;
      const int t1 = uses[0].tri;
      const int t2 = uses[1].tri;
      if (dirty[t1] || dirty[t2]) continue;
      const int c = uses[0].opposite;
      const int d = uses[1].opposite;
      const Vec2 A = m.v[key.first];
      const Vec2 B = m.v[key.second];
      const Vec2 C = m.v[c];
      const Vec2 D = m.v[d];
      // Valid flip: C and D on opposite sides of AB, and the new diagonal
      // CD separating A from B (strictly convex quad), nondegenerate children.
      const double side_c = (B - A).cross(C - A);
      const double side_d = (B - A).cross(D - A);
      if (!(side_c * side_d < 0.0)) continue;
      const double sep_a = (D - C).cross(A - C);
      const double sep_b = (D - C).cross(B - C);
      if (!(sep_a * sep_b < 0.0)) continue;
      if (std::abs(0.5 * (D - A).cross(C - A)) <= 1e-14 ||
          std::abs(0.5 * (C - B).cross(D - B)) <= 1e-14) {
        continue;
      }
      // Lawson criterion on the angle objective: flip only when it strictly
      // raises the pair's minimum angle (monotone, hence terminating; for
      // generic points this is the Delaunay criterion, and it also settles
      // the nearly co-circular ties quality-first).
      const double before = std::min(triangle_min_angle(A, B, C),
                                     triangle_min_angle(A, B, D));
      const double after = std::min(triangle_min_angle(A, D, C),
                                    triangle_min_angle(B, C, D));
      if (after <= before + 1e-12) continue;
      m.tris[t1] = {key.first, d, c};
      m.tris[t2] = {key.second, c, d};
      if (triangle_area(m.v[m.tris[t1][0]], m.v[m.tris[t1][1]], m.v[m.tris[t1][2]]) < 0) {
        std::swap(m.tris[t1][1], m.tris[t1][2]);
      }
      if (triangle_area(m.v[m.tris[t2][0]], m.v[m.tris[t2][1]], m.v[m.tris[t2][2]]) < 0) {
        std::swap(m.tris[t2][1], m.tris[t2][2]);
      }
      dirty[t1] = true;
      dirty[t2] = true;
      ++flips;
    }
    if (flips == 0) return;
  }
}

void smooth_interior(WorkMesh& m, int passes) {
  std::vector<bool> on_boundary(m.v.size(), false);
  for (const auto& [key, wet] : m.boundary) {
    (void)wet;
    on_boundary[key.first] = true;
    on_boundary[key.second] = true;
  }
  std::vector<std::vector<int>> incident(m.v.size());
  for (int t = 0; t < static_cast<int>(m.tris.size()); ++t) {
    for (int k = 0; k < 3; ++k) incident[m.tris[t][k]].push_back(t);
  }
  for (int pass = 0; pass < passes; ++pass) {
    for (int i = 0; i < static_cast<int>(m.v.size()); ++i) {
      if (on_boundary[i]) continue;
      // Average of the neighboring vertices.
      Vec2 sum{0, 0};
      int count = 0;
      for (int t : incident[i]) {
        for (int k = 0; k < 3; ++k) {
          if (m.tris[t][k] != i) {
            sum = sum + m.v[m.tris[t][k]];
            ++count;
          }
        }
      }
      if (count == 0) continue;
      // Laplacian move with step halving, rejected only if it would invert
      // or flatten an incident triangle; flips between passes restore the
      // connectivity quality.
      const Vec2 centroid = sum * (1.0 / count);
      const Vec2 old = m.v[i];
      for (double step : {1.0, 0.5, 0.25}) {
        m.v[i] = old + (centroid - old) * step;
        bool valid = true;
        for (int t : incident[i]) {
          if (triangle_area(m.v[m.tris[t][0]], m.v[m.tris[t][1]], m.v[m.tris[t][2]]) <=
              1e-14) {
            valid = false;
            break;
          }
        }
        if (valid) break;
        m.v[i] = old;
      }
    }
  }
}

// Direct treatment of triangles still below the angle gate: local pattern
// search on their interior vertices, centroid insertion when every vertex is
// pinned to the boundary, flips and smoothing in between.
void quality_rescue(WorkMesh& m, double h) {
  const double gate = (tol::kMeshMinAngleDeg + 1.0) * kPi / 180.0;
  for (int attempt = 0; attempt < 24; ++attempt) {
    std::vector<bool> on_boundary(m.v.size(), false);
    for (const auto& [key, wet] : m.boundary) {
      (void)wet;
      on_boundary[key.first] = true;
      on_boundary[key.second] = true;
    }
    std::vector<std::vector<int>> incident(m.v.size());
    for (int t = 0; t < static_cast<int>(m.tris.size()); ++t) {
      for (int k = 0; k < 3; ++k) incident[m.tris[t][k]].push_back(t);
    }
    auto vertex_quality = [&](int i) {
      double worst = 1e300;
      for (int t : incident[i]) {
        worst = std::min(worst, triangle_min_angle(m.v[m.tris[t][0]],
                                                   m.v[m.tris[t][1]],
                                                   m.v[m.tris[t][2]]));
      }
      return worst;
    };

    const int tri_count = static_cast<int>(m.tris.size());
    for (int t = 0; t < tri_count; ++t) {
      const Tri tri = m.tris[t];
      if (triangle_min_angle(m.v[tri[0]], m.v[tri[1]], m.v[tri[2]]) >= gate) continue;
      bool moved = false;
      for (int k = 0; k < 3 && !moved; ++k) {
        const int i = tri[k];
        if (on_boundary[i]) continue;
        // Pattern search maximizing the min angle of the incident star.
        const Vec2 old = m.v[i];
        double best = vertex_quality(i);
        Vec2 best_pos = old;
        for (double radius : {0.5 * h, 0.25 * h, 0.1 * h}) {
          for (int dir = 0; dir < 8; ++dir) {
            m.v[i] = old + unit_from_angle(dir * kPi / 4.0) * radius;
            bool valid = true;
            for (int tt : incident[i]) {
              if (triangle_area(m.v[m.tris[tt][0]], m.v[m.tris[tt][1]],
                                m.v[m.tris[tt][2]]) <= 1e-14) {
                valid = false;
                break;
              }
            }
            if (valid) {
              const double q = vertex_quality(i);
              if (q > best + 1e-12) {
                best = q;
                best_pos = m.v[i];
              }
            }
          }
        }
        m.v[i] = best_pos;
        moved = (best_pos - old).norm() > 0.0;
      }
    }

    // Rescan; if a triangle is still below the gate, refine through the
    // worst one's longest edge. The boundary geometry is preserved (boundary
    // midpoints stay on their straight segment) and the new vertex is
    // movable, so repeated attempts make structural progress.
    double worst = 1e300;
    Tri worst_tri{-1, -1, -1};
    for (const auto& tri : m.tris) {
      const double a = triangle_min_angle(m.v[tri[0]], m.v[tri[1]], m.v[tri[2]]);
      if (a < worst) {
        worst = a;
        worst_tri = tri;
      }
    }
    if (worst >= gate) return;
    const EdgeKey le = longest_edge(m, worst_tri);
    split_edge(m, le.first, le.second, 0);
    delaunay_flips(m);
    smooth_interior(m, 2);
    delaunay_flips(m);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// MarkedMesh

double MarkedMesh::area() const {
  KahanSum sum;
  for (const auto& t : triangles) {
    sum.add(triangle_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]));
  }
  return sum.value();
}

double MarkedMesh::sigma_length() const {
  KahanSum sum;
  for (const auto& e : boundary_edges) {
    if (!e.wetted) sum.add((vertices[e.a] - vertices[e.b]).norm());
  }
  return sum.value();
}

double MarkedMesh::gamma_length() const {
  KahanSum sum;
  for (const auto& e : boundary_edges) {
    if (e.wetted) sum.add((vertices[e.a] - vertices[e.b]).norm());
  }
  return sum.value();
}

double MarkedMesh::min_angle_deg() const {
  double worst = 180.0;
  for (const auto& t : triangles) {
    worst = std::min(worst, triangle_min_angle(vertices[t[0]], vertices[t[1]],
                                               vertices[t[2]]) *
                                180.0 / kPi);
  }
  return worst;
}

bool MarkedMesh::has_gamma() const {
  for (const auto& e : boundary_edges) {
    if (e.wetted) return true;
  }
  return false;
}

MarkedMesh build_marked_mesh(const std::vector<Vec2>& domain_polygon,
                             const ConvexSection& obstacle, double h, double snap) {
  if (domain_polygon.size() < 3 || !polygon_simple(domain_polygon)) {
    throw NonSimplePolygon();
  }
  std::vector<Vec2> poly = domain_polygon;
  if (polygon_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());
  if (polygon_area(poly) <= tol::kEmptyArea) throw NonSimplePolygon();

  WorkMesh m;
  m.v = poly;
  m.tris = ear_clip(poly);

  // Mark the input polygon edges; splits inherit the marker.
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % n];
    const bool wet = obstacle.distance_to_boundary(a) <= snap &&
                     obstacle.distance_to_boundary(b) <= snap &&
                     obstacle.distance_to_boundary((a + b) * 0.5) <= snap;
    m.boundary[edge_key(static_cast<int>(i), static_cast<int>((i + 1) % n))] = wet;
  }

  const bool debug = std::getenv("ABPCAP_MESH_DEBUG") != nullptr;
  auto report = [&](const char* stage, int round) {
    if (!debug) return;
    double worst = 1e300;
    double longest = 0.0;
    for (const auto& t : m.tris) {
      worst = std::min(worst, triangle_min_angle(m.v[t[0]], m.v[t[1]], m.v[t[2]]));
      for (int k = 0; k < 3; ++k) {
        longest = std::max(longest, (m.v[t[k]] - m.v[t[(k + 1) % 3]]).norm());
      }
    }
    std::fprintf(stderr, "[mesh] %s round=%d tris=%zu verts=%zu minang=%.3f deg maxedge=%.4f\n",
                 stage, round, m.tris.size(), m.v.size(), worst * 180.0 / kPi, longest);
  };
  report("earclip", -1);
  // Graded size field: edges near the boundary are refined to h/4 so the
  // vertex-based touching test resolves the boundary layer, growing back to
  // h in the bulk at Lipschitz rate 1/2.
  auto boundary_distance = [&poly, n](Vec2 p) {
    double best = 1e300;
    for (std::size_t i = 0; i < n; ++i) {
      best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
    }
    return best;
  };
  auto size_at = [&](Vec2 p) {
    return std::max(0.25 * h, std::min(h, 0.25 * h + 0.5 * boundary_distance(p)));
  };

  delaunay_flips(m);
  report("flip0", -1);
  for (int round = 0; round < 64; ++round) {
    // Split every edge longer than the local size, longest first.
    std::vector<std::pair<double, EdgeKey>> longs;
    std::map<EdgeKey, bool> seen;
    for (const auto& t : m.tris) {
      for (int k = 0; k < 3; ++k) {
        const EdgeKey key = edge_key(t[k], t[(k + 1) % 3]);
        if (seen.count(key)) continue;
        seen[key] = true;
        const double len = (m.v[key.first] - m.v[key.second]).norm();
        if (len > size_at((m.v[key.first] + m.v[key.second]) * 0.5)) {
          longs.push_back({len, key});
        }
      }
    }
    if (longs.empty()) break;
    std::sort(longs.rbegin(), longs.rend());
    for (const auto& [len, key] : longs) {
      (void)len;
      // The edge may already be gone (split through recursion).
      if (!tris_with_edge(m, key.first, key.second).empty()) {
        const double cur = (m.v[key.first] - m.v[key.second]).norm();
        if (cur > size_at((m.v[key.first] + m.v[key.second]) * 0.5)) {
          split_edge(m, key.first, key.second, 0);
        }
      }
    }
    delaunay_flips(m);
    smooth_interior(m, 2);
    delaunay_flips(m);
    report("round", round);
  }
  // Smoothing and flipping interact; iterate to a comfortable angle margin.
  double best_angle = 0.0;
  int stale = 0;
  for (int polish = 0; polish < 60; ++polish) {
    smooth_interior(m, 1);
    delaunay_flips(m);
    double worst = 1e300;
    for (const auto& t : m.tris) {
      worst = std::min(worst, triangle_min_angle(m.v[t[0]], m.v[t[1]], m.v[t[2]]));
    }
    worst *= 180.0 / kPi;
    if (worst > best_angle + 1e-3) {
      best_angle = worst;
      stale = 0;
    } else {
      ++stale;
    }
    if (worst >= 22.0 || stale >= 8) break;
  }
  quality_rescue(m, h);
  report("final", -1);

  MarkedMesh mesh;
  mesh.vertices = m.v;
  mesh.triangles = m.tris;
  mesh.target_h = h;
  for (const auto& [key, wet] : m.boundary) {
    mesh.boundary_edges.push_back({key.first, key.second, wet});
  }

  mesh.vertex_class.assign(mesh.vertices.size(), VertexClass::interior);
  std::vector<bool> touches_sigma(mesh.vertices.size(), false);
  std::vector<bool> touches_gamma(mesh.vertices.size(), false);
  for (const auto& e : mesh.boundary_edges) {
    (e.wetted ? touches_gamma : touches_sigma)[e.a] = true;
    (e.wetted ? touches_gamma : touches_sigma)[e.b] = true;
  }
  mesh.obstacle_normal.assign(mesh.vertices.size(), Vec2{0, 0});
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (touches_gamma[i] && touches_sigma[i]) {
      mesh.vertex_class[i] = VertexClass::contact;
    } else if (touches_gamma[i]) {
      mesh.vertex_class[i] = VertexClass::gamma_region;
    } else if (touches_sigma[i]) {
      mesh.vertex_class[i] = VertexClass::sigma;
    }
    if (touches_gamma[i]) {
      mesh.obstacle_normal[i] = obstacle.boundary_normal(mesh.vertices[i]);
    }
  }

  const double min_angle = mesh.min_angle_deg();
  if (min_angle < tol::kMeshMinAngleDeg) throw MeshQualityFailure(min_angle);
  return mesh;
}

// ---------------------------------------------------------------------------
// Solve

NeumannSolution solve_neumann(const MarkedMesh& mesh, double lambda) {
  if (!(std::abs(lambda) < 1.0)) throw InvalidLambda(lambda);
  const int n = static_cast<int>(mesh.vertices.size());

  NeumannSolution sol;
  sol.mesh = mesh;
  sol.lambda = lambda;
  sol.area = mesh.area();
  sol.sigma_len = mesh.sigma_length();
  sol.gamma_len = mesh.gamma_length();
  sol.c = (sol.sigma_len - lambda * sol.gamma_len) / sol.area;

  // P1 stiffness matrix and load vector.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.triangles.size() * 9);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  std::vector<double> lumped(n, 0.0);
  for (const auto& t : mesh.triangles) {
    const Vec2 a = mesh.vertices[t[0]];
    const Vec2 b = mesh.vertices[t[1]];
    const Vec2 c = mesh.vertices[t[2]];
    const double area2 = (b - a).cross(c - a);
    const double area = 0.5 * area2;
    // Gradient of the barycentric basis functions.
    const Vec2 g[3] = {{(b.y - c.y) / area2, (c.x - b.x) / area2},
                       {(c.y - a.y) / area2, (a.x - c.x) / area2},
                       {(a.y - b.y) / area2, (b.x - a.x) / area2}};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        trip.emplace_back(t[i], t[j], area * g[i].dot(g[j]));
      }
      f[t[i]] += -sol.c * area / 3.0;  // Int -c phi_i
      lumped[t[i]] += area / 3.0;
    }
  }
  for (const auto& e : mesh.boundary_edges) {
    const double len = (mesh.vertices[e.a] - mesh.vertices[e.b]).norm();
    const double g = e.wetted ? -lambda : 1.0;
    f[e.a] += 0.5 * g * len;
    f[e.b] += 0.5 * g * len;
  }

  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());

  // Pin vertex 0 (the system is singular up to constants; f is compatible by
  // the choice of c), then shift to lumped-mass mean zero and polish with
  // iterative refinement against the unpinned system.
  std::vector<Eigen::Triplet<double>> trip_pinned;
  trip_pinned.reserve(trip.size() + 1);
  for (const auto& tr : trip) {
    if (tr.row() == 0 || tr.col() == 0) continue;
    trip_pinned.push_back(tr);
  }
  trip_pinned.emplace_back(0, 0, 1.0);
  Eigen::SparseMatrix<double> Kp(n, n);
  Kp.setFromTriplets(trip_pinned.begin(), trip_pinned.end());

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  solver.compute(Kp);
  if (solver.info() != Eigen::Success) throw SolverDivergence(1e300);

  Eigen::VectorXd rhs = f;
  rhs[0] = 0.0;
  Eigen::VectorXd u = solver.solve(rhs);

  const double mass_total = std::accumulate(lumped.begin(), lumped.end(), 0.0);
  const double f_scale = std::max(1.0, f.lpNorm<Eigen::Infinity>());
  double residual = 0.0;
  for (int iter = 0; iter < 4; ++iter) {
    Eigen::VectorXd r = f - K * u;
    residual = r.lpNorm<Eigen::Infinity>() / f_scale;
    if (residual <= 1e-13) break;
    r[0] = 0.0;
    u += solver.solve(r);
  }
  if (residual > tol::kWeakResidual) throw SolverDivergence(residual);
  sol.residual_rel = residual;

  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += lumped[i] * u[i];
  mean /= mass_total;
  sol.u.resize(n);
  for (int i = 0; i < n; ++i) sol.u[i] = u[i] - mean;
  return sol;
}

// ---------------------------------------------------------------------------
// Touching and estimates

Touching touching_classify(const NeumannSolution& sol, Vec2 xi) {
  const int n = static_cast<int>(sol.u.size());
  int best = 0;
  double best_val = 1e300;
  for (int i = 0; i < n; ++i) {
    const double val = sol.u[i] - xi.dot(sol.mesh.vertices[i]);
    if (val < best_val - 1e-15) {
      best_val = val;
      best = i;
    }
  }
  Touching out;
  out.vertex = best;
  switch (sol.mesh.vertex_class[best]) {
    case VertexClass::interior:
      out.cls = TouchClass::interior;
      break;
    case VertexClass::sigma:
      out.cls = TouchClass::sigma;
      break;
    default:
      out.cls = TouchClass::gamma;  // wetted region, contact set included
      break;
  }
  return out;
}

SetEstimates estimate_sets(const NeumannSolution& sol, long samples, std::uint64_t seed) {
  if (samples < 1) throw GeomError("samples must be >= 1");
  SetEstimates est;
  est.samples = samples;
  est.seed = seed;

  std::vector<int> gamma_vertices;
  for (std::size_t i = 0; i < sol.mesh.vertices.size(); ++i) {
    if (sol.mesh.vertex_class[i] == VertexClass::gamma_region ||
        sol.mesh.vertex_class[i] == VertexClass::contact) {
      gamma_vertices.push_back(static_cast<int>(i));
    }
  }
  const bool with_gamma = !gamma_vertices.empty();

  Rng rng(seed);
  long in_a = 0;
  long in_b = 0;
  long violations = 0;
  long total = 0;
  while (total < samples) {
    const double x = rng.uniform(-1.0, 1.0);
    const double y = rng.uniform(-1.0, 1.0);
    if (x * x + y * y > 1.0) continue;
    ++total;
    const Vec2 xi{x, y};
    const Touching touch = touching_classify(sol, xi);
    if (touch.cls == TouchClass::interior) ++in_a;
    if (!with_gamma) continue;
    // Gamma-restricted argmin (contact vertices count as Gamma).
    int best = gamma_vertices.front();
    double best_val = 1e300;
    for (int i : gamma_vertices) {
      const double val = sol.u[i] - xi.dot(sol.mesh.vertices[i]);
      if (val < best_val - 1e-15) {
        best_val = val;
        best = i;
      }
    }
    if (xi.dot(sol.mesh.obstacle_normal[best]) > sol.lambda) {
      ++in_b;
      if (touch.cls == TouchClass::sigma) ++violations;
    }
  }

  auto finish = [&](long hits) {
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    return std::pair<double, double>{
        kPi * p, kPi * std::sqrt(std::max(p * (1.0 - p), 0.0) / samples)};
  };
  const auto [am, as] = finish(in_a);
  est.a_measure = am;
  est.a_stderr = as;
  if (with_gamma) {
    const auto [bm, bs] = finish(in_b);
    est.b_measure = bm;
    est.b_stderr = bs;
    est.violation_fraction =
        in_b > 0 ? static_cast<double>(violations) / static_cast<double>(in_b) : 0.0;
  }
  return est;
}

ChainReport abp_chain_report(const NeumannSolution& sol, long samples,
                             std::uint64_t seed) {
  ChainReport rep;
  rep.estimates = estimate_sets(sol, samples, seed);
  rep.measured_a = rep.estimates.a_measure;
  rep.a_stderr = rep.estimates.a_stderr;
  rep.cap_area = cap_volume(2, sol.lambda, 1.0);
  rep.c = sol.c;
  rep.upper_bound = 0.25 * sol.c * sol.c * sol.area;
  rep.tolerance = 3.0 * rep.a_stderr + kChainToleranceH * sol.mesh.target_h;
  rep.lower_ok = rep.measured_a >= rep.cap_area - rep.tolerance;
  rep.upper_ok = rep.measured_a <= rep.upper_bound + rep.tolerance;
  return rep;
}

}  // namespace abpcap
