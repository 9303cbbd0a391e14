#include "abpcap/partition.hpp"

#include <algorithm>
#include <cmath>

namespace abpcap {

namespace {

std::string first_issue_text(const ValidationReport& rep) {
  const auto& i = rep.issues.front();
  return i.rule + " (i=" + std::to_string(i.index_i) + ", j=" +
         std::to_string(i.index_j) + ", magnitude=" + std::to_string(i.magnitude) + ")";
}

// Groups coincident config points. Equal values join the first compatible
// site; differing values stay as their own (dominated or dominating) site.
struct Sites {
  std::vector<int> site_of_point;
  std::vector<Vec2> points;
  std::vector<Vec2> normals;
  std::vector<double> values;
  std::vector<bool> dominated;  // coincident with a strictly lower value
};

Sites group_sites(const ContactConfig& cfg) {
  Sites s;
  const int n = static_cast<int>(cfg.size());
  s.site_of_point.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    int found = -1;
    for (std::size_t k = 0; k < s.points.size(); ++k) {
      if ((cfg.points[i] - s.points[k]).norm() <= tol::kCoincidentPoint &&
          std::abs(cfg.values[i] - s.values[k]) <= tol::kArgmaxTie) {
        found = static_cast<int>(k);
        break;
      }
    }
    if (found >= 0) {
      s.site_of_point[i] = found;
      continue;
    }
    s.site_of_point[i] = static_cast<int>(s.points.size());
    s.points.push_back(cfg.points[i]);
    s.normals.push_back(cfg.normals[i]);
    s.values.push_back(cfg.values[i]);
  }
  const std::size_t m = s.points.size();
  s.dominated.assign(m, false);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      if (a == b) continue;
      if ((s.points[a] - s.points[b]).norm() <= tol::kCoincidentPoint &&
          s.values[a] > s.values[b] + tol::kArgmaxTie) {
        s.dominated[a] = true;
      }
    }
  }
  return s;
}

}  // namespace

CellPartition build_cells(const ContactConfig& cfg) {
  const ValidationReport rep = validate_contact_config(cfg);
  if (!rep.ok()) throw InvalidConfig("contact config invalid: " + first_issue_text(rep));

  const Sites s = group_sites(cfg);
  const std::size_t m = s.points.size();

  CellPartition part;
  part.config = cfg;
  part.site_of_point = s.site_of_point;
  part.site_points = s.points;
  part.site_normals = s.normals;
  part.site_values = s.values;
  part.cells.reserve(m);

  for (std::size_t i = 0; i < m; ++i) {
    if (s.dominated[i]) {
      part.cells.push_back(ConvexCell::empty_cell());
      continue;
    }
    std::vector<HalfPlane> planes;
    std::vector<int> sources;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      const Vec2 d = s.points[i] - s.points[j];
      const double dist = d.norm();
      if (dist <= tol::kCoincidentPoint) continue;  // j is dominated by i
      const Vec2 normal = d * (1.0 / dist);
      const double ray = normal.dot(s.normals[i]);
      if (ray < -tol::kRayProperty) {
        throw RayPropertyViolation(static_cast<int>(i), static_cast<int>(j), ray);
      }
      planes.push_back({normal, (s.values[i] - s.values[j]) / dist});
      sources.push_back(static_cast<int>(j));
    }
    part.cells.push_back(ConvexCell::from_halfplanes(std::move(planes), std::move(sources)));
  }

  part.active.resize(m);
  for (std::size_t i = 0; i < m; ++i) part.active[i] = !part.cells[i].empty();
  return part;
}

std::vector<int> locate(const ContactConfig& cfg, Vec2 xi) {
  std::vector<int> out;
  const int n = static_cast<int>(cfg.size());
  if (n == 0) return out;
  double best = -1e300;
  for (int j = 0; j < n; ++j) {
    best = std::max(best, xi.dot(cfg.points[j]) - cfg.values[j]);
  }
  for (int j = 0; j < n; ++j) {
    if (xi.dot(cfg.points[j]) - cfg.values[j] >= best - tol::kArgmaxTie) {
      out.push_back(j);
    }
  }
  return out;
}

SliceResult slice_cylinder(const CylinderContactConfig& cfg,
                           const std::vector<double>& w) {
  const ValidationReport rep = validate_cylinder_config(cfg);
  if (!rep.ok()) throw InvalidConfig("cylinder config invalid: " + first_issue_text(rep));
  if (static_cast<int>(w.size()) != cfg.ambient_codim) {
    throw InvalidConfig("slice vector has wrong dimension");
  }

  ContactConfig planar;
  planar.source = cfg.planar.source;
  const std::size_t n = cfg.planar.size();
  for (std::size_t i = 0; i < n; ++i) {
    double adj = cfg.values[i];
    for (std::size_t k = 0; k < w.size(); ++k) adj -= w[k] * cfg.heights[i][k];
    // Coincident planar points merge keeping the minimal adjusted value.
    bool merged = false;
    for (std::size_t j = 0; j < planar.points.size(); ++j) {
      if ((planar.points[j] - cfg.planar.points[i]).norm() <= tol::kCoincidentPoint) {
        planar.values[j] = std::min(planar.values[j], adj);
        merged = true;
        break;
      }
    }
    if (!merged) {
      planar.points.push_back(cfg.planar.points[i]);
      planar.normals.push_back(cfg.planar.normals[i]);
      planar.values.push_back(adj);
    }
  }

  SliceResult out{planar, build_cells(planar)};
  return out;
}

bool cells_neighboring(const CellPartition& part, int site_s, int site_t) {
  if (site_s == site_t) return false;
  // Coincident sites (dominated duplicates) are degenerate neighbors.
  if ((part.site_points[site_s] - part.site_points[site_t]).norm() <=
      tol::kCoincidentPoint) {
    return true;
  }
  auto has_constraint_from = [&](int cell, int source) {
    const auto& src = part.cells[cell].sources();
    return std::find(src.begin(), src.end(), source) != src.end();
  };
  return has_constraint_from(site_s, site_t) || has_constraint_from(site_t, site_s);
}

namespace {

bool same_halfplane_set(const ConvexCell& a, const ConvexCell& b) {
  if (a.empty() != b.empty()) return false;
  if (a.halfplanes().size() != b.halfplanes().size()) return false;
  std::vector<bool> used(b.halfplanes().size(), false);
  for (const auto& ha : a.halfplanes()) {
    bool matched = false;
    for (std::size_t k = 0; k < b.halfplanes().size(); ++k) {
      if (used[k]) continue;
      const auto& hb = b.halfplanes()[k];
      if (ha.normal.dot(hb.normal) > 1.0 - tol::kUnitNormal &&
          std::abs(ha.offset - hb.offset) <= tol::kSharedEdge) {
        used[k] = true;
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

}  // namespace

SliceResult delete_cell(const ContactConfig& cfg, int j) {
  const int n = static_cast<int>(cfg.size());
  if (n < 2) throw InvalidConfig("delete_cell needs at least 2 points");
  if (j < 0 || j >= n) throw InvalidIndex(j);

  const CellPartition before = build_cells(cfg);

  ContactConfig rest;
  rest.source = cfg.source;
  for (int i = 0; i < n; ++i) {
    if (i == j) continue;
    rest.points.push_back(cfg.points[i]);
    rest.normals.push_back(cfg.normals[i]);
    rest.values.push_back(cfg.values[i]);
  }
  CellPartition after = build_cells(rest);

  // Post-check: cells that are not neighbors of the deleted site must be
  // unchanged (same canonical H-representation).
  const int deleted_site = before.site_of_point[j];
  for (int i = 0; i < n; ++i) {
    if (i == j) continue;
    const int sb = before.site_of_point[i];
    const int sa = after.site_of_point[i > j ? i - 1 : i];
    if (sb == deleted_site) continue;  // merged with the deleted point
    if (cells_neighboring(before, sb, deleted_site)) continue;
    if (!before.active[sb] && !after.active[sa]) continue;
    if (!same_halfplane_set(before.cells[sb], after.cells[sa])) {
      throw GeomError("delete_cell post-check failed: non-neighboring cell " +
                      std::to_string(sb) + " changed");
    }
  }

  return SliceResult{rest, std::move(after)};
}

}  // namespace abpcap
