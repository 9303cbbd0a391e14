#pragma once

#include <vector>

#include "abpcap/convexbody.hpp"
#include "abpcap/geom2d.hpp"

// Subdifferential cells of finite boundary data: A_i is the set of slopes xi
// with xi . (x_i - x_j) >= v_i - v_j for all j, a power-diagram-style convex
// partition of the plane. Coincident points with equal values are merged to
// one site; with different values the lower value dominates and the other
// site's cell is empty.

namespace abpcap {

class InvalidConfig : public GeomError {
 public:
  explicit InvalidConfig(const std::string& what) : GeomError(what) {}
};

class RayPropertyViolation : public GeomError {
 public:
  RayPropertyViolation(int site_i, int site_j, double value)
      : GeomError("ray property violated: constraint of cell " +
                  std::to_string(site_i) + " from site " + std::to_string(site_j) +
                  " has m . nu = " + std::to_string(value)),
        site_i(site_i),
        site_j(site_j),
        value(value) {}
  int site_i;
  int site_j;
  double value;
};

class InvalidIndex : public GeomError {
 public:
  explicit InvalidIndex(int j) : GeomError("index out of range: " + std::to_string(j)) {}
};

struct CellPartition {
  ContactConfig config;             // generating data, kept verbatim
  std::vector<int> site_of_point;   // config index -> site index
  std::vector<Vec2> site_points;    // representative per site
  std::vector<Vec2> site_normals;
  std::vector<double> site_values;
  std::vector<ConvexCell> cells;    // parallel to sites
  std::vector<bool> active;         // nonempty interior

  std::size_t site_count() const { return cells.size(); }
};

// Builds the partition. Throws InvalidConfig if validation fails and
// RayPropertyViolation if a constraint normal m of an active cell has
// m . nu_i < -tol::kRayProperty (bad input or a bug upstream).
CellPartition build_cells(const ContactConfig& cfg);

// Argmax set of j -> xi . x_j - v(x_j) over config indices, with tie
// tolerance tol::kArgmaxTie. Agrees with half-plane membership of
// build_cells.
std::vector<int> locate(const ContactConfig& cfg, Vec2 xi);

struct SliceResult {
  ContactConfig config;     // planar data with adjusted values
  CellPartition partition;
};

// The w-slice of the cylinder configuration: planar points p_i with values
// v_i - w . h_i; coincident planar points are merged keeping the minimal
// adjusted value.
SliceResult slice_cylinder(const CylinderContactConfig& cfg,
                           const std::vector<double>& w);

// Restriction of (K, v) to K minus point j. Asserts the deleting-a-cell
// post-condition: cells not neighboring the deleted site are unchanged.
SliceResult delete_cell(const ContactConfig& cfg, int j);

// True when H^1(boundary A_s ∩ boundary A_t) > 0, detected through the
// canonical H-representations (a positive-length shared edge lies on the
// (s, t) bisector, which is then an active constraint of either cell).
bool cells_neighboring(const CellPartition& part, int site_s, int site_t);

}  // namespace abpcap
