#pragma once

// Single source of truth for every tolerance and fixed parameter used by the
// library and asserted by the test suites. Values are part of the public
// contract: reports embed them verbatim.

namespace abpcap {

inline constexpr const char* kVersion = "abpcap 0.1.0";

// Half-width of the clipping box used to cache vertex loops of unbounded
// cells. Disk measures are only ever taken at radius <= 3, far inside.
inline constexpr double kBoxHalfWidth = 64.0;

namespace tol {

// Unit-vector length check.
inline constexpr double kUnitNormal = 1e-12;

// Supporting condition nu_i . (x_j - x_i) <= kSupporting.
inline constexpr double kSupporting = 1e-9;

// Membership of a contact point on its source boundary.
inline constexpr double kOnBoundary = 1e-9;

// Precondition of boundary_normal queries.
inline constexpr double kBoundaryQuery = 1e-6;

// Argmax tie tolerance in locate().
inline constexpr double kArgmaxTie = 1e-12;

// Shared-edge (neighboring cells) detection.
inline constexpr double kSharedEdge = 1e-9;

// Ray property: constraint normal m must satisfy m . nu_i >= -kRayProperty.
inline constexpr double kRayProperty = 1e-9;

// H-representation feasibility (degenerate slab detection).
inline constexpr double kFeasibility = 1e-12;

// A cell whose clipped area is below this is treated as empty interior.
inline constexpr double kEmptyArea = 1e-12;

// Two contact points closer than this are treated as coincident.
inline constexpr double kCoincidentPoint = 1e-9;

// Inequality margins (measure and phi checks).
inline constexpr double kMeasure = 1e-9;

// Crossing counts are undefined this close to a breakpoint level.
inline constexpr double kBreakpoint = 1e-9;

// Scan grid points this close to a breakpoint are nudged by this amount.
inline constexpr double kBreakpointNudge = 1e-8;

// Default snap tolerance classifying droplet edges as wetted.
inline constexpr double kSnapDefault = 1e-7;

// Absolute tolerance of the adaptive quadrature in cap_volume (N >= 4).
inline constexpr double kCapQuadrature = 1e-12;

// Step of the central differences used by derivative identities.
inline constexpr double kFdStep = 1e-6;

// Midpoints closer than this to a breakpoint are excluded from the
// derivative identity check.
inline constexpr double kFdExclusion = 1e-3;

// Relative residual bound of the discrete Neumann solve.
inline constexpr double kWeakResidual = 1e-10;

// Minimum admissible mesh angle in degrees.
inline constexpr double kMeshMinAngleDeg = 15.0;

}  // namespace tol
}  // namespace abpcap
