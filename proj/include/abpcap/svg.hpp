#pragma once

#include <string>

#include "abpcap/abp.hpp"
#include "abpcap/capillary.hpp"
#include "abpcap/neumann.hpp"
#include "abpcap/partition.hpp"

// Flat deterministic SVG rendering: fixed viewport mapping, a small legend,
// no interactive features.

namespace abpcap {

// Cells clipped to the viewport, the unit circle, and the per-normal
// lambda-level chords.
std::string svg_partition(const CellPartition& part, double lambda);

// Obstacle, droplet outline, wetted edges highlighted.
std::string svg_capillary(const CapillaryScene& scene, const EnergyBreakdown& e);

// Triangles with boundary edges colored by marker.
std::string svg_mesh(const MarkedMesh& mesh);

}  // namespace abpcap
