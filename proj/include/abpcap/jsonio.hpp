#pragma once

#include <string>

#include <json.hpp>

#include "abpcap/abp.hpp"
#include "abpcap/capillary.hpp"
#include "abpcap/convexbody.hpp"
#include "abpcap/neumann.hpp"
#include "abpcap/partition.hpp"

// JSON schemas of the external interfaces. Parsing is strict: unknown object
// keys are rejected so that typos in scene files fail loudly.

namespace abpcap {

class InputError : public GeomError {
 public:
  explicit InputError(const std::string& what) : GeomError(what) {}
};

using Json = nlohmann::json;

// {"type":"polygon","vertices":[[x,y],...]} | {"type":"disk","radius":r,
// "center":[x,y]} | {"type":"support_sampled","samples":[[dx,dy,s],...]}
ConvexSection parse_section(const Json& j);
Json section_to_json(const ConvexSection& s);

// {"section": <section>?, "contacts":[{"point":[x,y],"normal":[nx,ny]?,
// "value":v},...]}; normals may be omitted only when a section is present.
ContactConfig parse_contact_scene(const Json& j);
Json contact_scene_to_json(const ContactConfig& cfg);

// {"obstacle": <section>, "droplet": [[x,y],...], "lambda": l, "snap": tol?,
// "h": target? } — "h" is consumed by the neumann-chain command.
struct SceneWithMesh {
  CapillaryScene scene;
  double h = 0.05;
  bool has_h = false;
};
SceneWithMesh parse_capillary_scene(const Json& j);
Json capillary_scene_to_json(const CapillaryScene& scene);

Json partition_to_json(const CellPartition& part);
Json measure_to_json(const AbpMeasureResult& m);
Json scan_to_json(const ScanTable& table);
std::string scan_to_csv(const ScanTable& table);
Json diagnostics_to_json(const CellDiagnostics& diag);
Json energy_to_json(const EnergyBreakdown& e);
Json mesh_to_json(const MarkedMesh& mesh);
Json chain_to_json(const ChainReport& rep);
Json fuzz_to_json(const FuzzReport& rep);

// FNV-1a over raw bytes, rendered as fixed-width hex.
std::string content_hash(const std::string& bytes);

}  // namespace abpcap
