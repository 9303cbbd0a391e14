#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "abpcap/convexbody.hpp"
#include "abpcap/geom2d.hpp"

// Mixed Neumann problem on polygonal droplet domains outside a convex
// obstacle: Laplace u = c in Omega, du/dn = 1 on the free interface Sigma,
// du/dn = -lambda on the wetted region Gamma, with c fixed by compatibility.
// The solution feeds the touching-plane classifier and the ABP chain report.

namespace abpcap {

class MeshQualityFailure : public GeomError {
 public:
  explicit MeshQualityFailure(double min_angle_deg)
      : GeomError("mesh min angle below 15 degrees: " + std::to_string(min_angle_deg)) {}
};

class SolverDivergence : public GeomError {
 public:
  explicit SolverDivergence(double residual)
      : GeomError("linear solve failed to reach tolerance, residual " +
                  std::to_string(residual)) {}
};

enum class VertexClass { interior, sigma, gamma_region, contact };

struct MarkedMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // CCW
  struct BoundaryEdge {
    int a = 0;
    int b = 0;
    bool wetted = false;  // Gamma edge (on the obstacle), else Sigma
  };
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<VertexClass> vertex_class;
  std::vector<Vec2> obstacle_normal;  // per vertex, set on Gamma/contact vertices
  double target_h = 0.0;

  double area() const;
  double sigma_length() const;
  double gamma_length() const;
  double min_angle_deg() const;
  bool has_gamma() const;
};

// Triangulates the polygon (ear clipping, then longest-edge refinement with
// Delaunay flips and interior smoothing to the target edge length h) and
// marks boundary edges lying on the obstacle as wetted. An empty wetted set
// is allowed (droplet off the obstacle).
MarkedMesh build_marked_mesh(const std::vector<Vec2>& domain_polygon,
                             const ConvexSection& obstacle, double h,
                             double snap = tol::kSnapDefault);

struct NeumannSolution {
  MarkedMesh mesh;
  std::vector<double> u;  // nodal, lumped-mass mean zero
  double c = 0.0;         // (|Sigma| - lambda |Gamma|) / |Omega|
  double lambda = 0.0;
  double area = 0.0;
  double sigma_len = 0.0;
  double gamma_len = 0.0;
  double residual_rel = 0.0;  // weak-form residual over nodal basis functions
};

NeumannSolution solve_neumann(const MarkedMesh& mesh, double lambda);

enum class TouchClass { interior, sigma, gamma };

struct Touching {
  int vertex = -1;
  TouchClass cls = TouchClass::interior;
};

// Vertex minimizing u(y) - xi . y (lowest index on ties) with its marker
// class; gamma covers wetted-region and contact vertices.
Touching touching_classify(const NeumannSolution& sol, Vec2 xi);

struct SetEstimates {
  double a_measure = 0.0;  // |{xi in B_1 : touching point interior}|
  double a_stderr = 0.0;
  std::optional<double> b_measure;  // |B^lambda_{u_Gamma} ∩ B_1| (absent without Gamma)
  std::optional<double> b_stderr;
  std::optional<double> violation_fraction;  // fraction of B-hat touching on Sigma
  long samples = 0;
  std::uint64_t seed = 0;
};

SetEstimates estimate_sets(const NeumannSolution& sol, long samples, std::uint64_t seed);

struct ChainReport {
  double measured_a = 0.0;        // sampled |A_u ∩ B_1|
  double a_stderr = 0.0;
  double cap_area = 0.0;          // |B^lambda| in the plane
  double c = 0.0;
  double upper_bound = 0.0;       // (c/2)^2 |Omega|
  double tolerance = 0.0;         // 3 stderr + C h
  bool lower_ok = false;          // measured_a >= cap_area - tolerance
  bool upper_ok = false;          // measured_a <= upper_bound + tolerance
  SetEstimates estimates;
};

// Outer links of the ABP chain at desk scale. The O(h) constant in the
// tolerance was calibrated on the spherical-cap reference run.
inline constexpr double kChainToleranceH = 2.0;

ChainReport abp_chain_report(const NeumannSolution& sol, long samples,
                             std::uint64_t seed);

}  // namespace abpcap
