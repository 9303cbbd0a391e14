#include "abpcap/jsonio.hpp"

#include <cinttypes>
#include <cstdio>

namespace abpcap {

namespace {

void require_keys(const Json& j, std::initializer_list<const char*> allowed,
                  const char* what) {
  if (!j.is_object()) throw InputError(std::string(what) + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : allowed) {
      if (key == k) ok = true;
    }
    if (!ok) throw InputError(std::string(what) + ": unknown field \"" + key + "\"");
  }
}

Vec2 parse_vec2(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw InputError(std::string(what) + ": expected [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Json vec2_to_json(Vec2 v) { return Json::array({v.x, v.y}); }

Json loop_to_json(const std::vector<Vec2>& loop) {
  Json out = Json::array();
  for (const Vec2& v : loop) out.push_back(vec2_to_json(v));
  return out;
}

double number_field(const Json& j, const char* key, const char* what) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw InputError(std::string(what) + ": missing numeric field \"" + key + "\"");
  }
  return j[key].get<double>();
}

}  // namespace

ConvexSection parse_section(const Json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw InputError("section: missing \"type\"");
  }
  const std::string type = j["type"].get<std::string>();
  if (type == "polygon") {
    require_keys(j, {"type", "vertices"}, "section");
    if (!j.contains("vertices") || !j["vertices"].is_array()) {
      throw InputError("section: polygon needs \"vertices\"");
    }
    std::vector<Vec2> verts;
    for (const auto& v : j["vertices"]) verts.push_back(parse_vec2(v, "vertex"));
    return ConvexSection::polygon(std::move(verts));
  }
  if (type == "disk") {
    require_keys(j, {"type", "radius", "center"}, "section");
    const double r = number_field(j, "radius", "section");
    Vec2 center{0, 0};
    if (j.contains("center")) center = parse_vec2(j["center"], "center");
    return ConvexSection::disk(r, center);
  }
  if (type == "support_sampled") {
    require_keys(j, {"type", "samples"}, "section");
    if (!j.contains("samples") || !j["samples"].is_array()) {
      throw InputError("section: support_sampled needs \"samples\"");
    }
    std::vector<std::pair<Vec2, double>> samples;
    for (const auto& s : j["samples"]) {
      if (!s.is_array() || s.size() != 3) {
        throw InputError("section: each support sample is [dx, dy, value]");
      }
      samples.push_back({{s[0].get<double>(), s[1].get<double>()}, s[2].get<double>()});
    }
    return ConvexSection::support_sampled(std::move(samples));
  }
  throw InputError("section: unknown type \"" + type + "\"");
}

Json section_to_json(const ConvexSection& s) {
  Json out;
  switch (s.kind()) {
    case ConvexSection::Kind::polygon:
      out["type"] = "polygon";
      out["vertices"] = loop_to_json(s.vertices());
      break;
    case ConvexSection::Kind::disk:
      out["type"] = "disk";
      out["radius"] = s.disk_radius();
      out["center"] = vec2_to_json(s.disk_center());
      break;
    case ConvexSection::Kind::support_sampled: {
      out["type"] = "support_sampled";
      Json samples = Json::array();
      for (const auto& [dir, value] : s.support_samples()) {
        samples.push_back(Json::array({dir.x, dir.y, value}));
      }
      out["samples"] = samples;
      break;
    }
  }
  return out;
}

ContactConfig parse_contact_scene(const Json& j) {
  require_keys(j, {"section", "contacts"}, "scene");
  ContactConfig cfg;
  if (j.contains("section")) cfg.source = parse_section(j["section"]);
  if (!j.contains("contacts") || !j["contacts"].is_array() || j["contacts"].empty()) {
    throw InputError("scene: needs a nonempty \"contacts\" array");
  }
  for (const auto& c : j["contacts"]) {
    require_keys(c, {"point", "normal", "value"}, "contact");
    if (!c.contains("point")) throw InputError("contact: missing \"point\"");
    const Vec2 p = parse_vec2(c["point"], "contact point");
    Vec2 nu;
    if (c.contains("normal")) {
      nu = parse_vec2(c["normal"], "contact normal");
    } else if (cfg.source.has_value()) {
      nu = cfg.source->boundary_normal(p);
    } else {
      throw InputError("contact: \"normal\" required when no section is given");
    }
    cfg.points.push_back(p);
    cfg.normals.push_back(nu);
    cfg.values.push_back(c.contains("value") ? number_field(c, "value", "contact")
                                             : 0.0);
  }
  return cfg;
}

Json contact_scene_to_json(const ContactConfig& cfg) {
  Json out;
  if (cfg.source.has_value()) out["section"] = section_to_json(*cfg.source);
  Json contacts = Json::array();
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    Json c;
    c["point"] = vec2_to_json(cfg.points[i]);
    c["normal"] = vec2_to_json(cfg.normals[i]);
    c["value"] = cfg.values[i];
    contacts.push_back(c);
  }
  out["contacts"] = contacts;
  return out;
}

SceneWithMesh parse_capillary_scene(const Json& j) {
  require_keys(j, {"obstacle", "droplet", "lambda", "snap", "h"}, "scene");
  SceneWithMesh out;
  if (!j.contains("obstacle")) throw InputError("scene: missing \"obstacle\"");
  out.scene.obstacle = parse_section(j["obstacle"]);
  if (!j.contains("droplet") || !j["droplet"].is_array()) {
    throw InputError("scene: missing \"droplet\" polygon");
  }
  for (const auto& v : j["droplet"]) {
    out.scene.droplet.push_back(parse_vec2(v, "droplet vertex"));
  }
  out.scene.lambda = number_field(j, "lambda", "scene");
  if (j.contains("snap")) out.scene.snap = number_field(j, "snap", "scene");
  if (j.contains("h")) {
    out.h = number_field(j, "h", "scene");
    out.has_h = true;
  }
  return out;
}

Json capillary_scene_to_json(const CapillaryScene& scene) {
  Json out;
  out["obstacle"] = section_to_json(scene.obstacle);
  out["droplet"] = loop_to_json(scene.droplet);
  out["lambda"] = scene.lambda;
  out["snap"] = scene.snap;
  return out;
}

Json partition_to_json(const CellPartition& part) {
  Json out;
  out["box_half_width"] = kBoxHalfWidth;
  out["site_of_point"] = part.site_of_point;
  Json cells = Json::array();
  for (std::size_t i = 0; i < part.site_count(); ++i) {
    Json c;
    c["site"] = i;
    c["point"] = vec2_to_json(part.site_points[i]);
    c["normal"] = vec2_to_json(part.site_normals[i]);
    c["value"] = part.site_values[i];
    c["active"] = static_cast<bool>(part.active[i]);
    Json planes = Json::array();
    for (const auto& h : part.cells[i].halfplanes()) {
      Json hp;
      hp["normal"] = vec2_to_json(h.normal);
      hp["offset"] = h.offset;
      planes.push_back(hp);
    }
    c["halfplanes"] = planes;
    c["loop"] = loop_to_json(part.cells[i].loop());
    cells.push_back(c);
  }
  out["cells"] = cells;
  return out;
}

Json measure_to_json(const AbpMeasureResult& m) {
  Json out;
  out["value"] = m.value;
  out["method"] = m.method == MeasureMethod::exact ? "exact" : "monte_carlo";
  out["stderr"] = m.stderr_;
  out["radius"] = m.radius;
  out["lambda"] = m.lambda;
  out["per_cell"] = m.per_cell;
  return out;
}

Json scan_to_json(const ScanTable& table) {
  Json rows = Json::array();
  for (const auto& r : table.rows) {
    Json row;
    row["lambda"] = r.lambda;
    row["phi_K"] = r.phi_k;
    row["phi_H"] = r.phi_h;
    row["margin"] = r.margin;
    row["crossing_count"] = r.crossings;
    rows.push_back(row);
  }
  Json checks = Json::array();
  for (const auto& d : table.derivative_checks) {
    Json row;
    row["midpoint"] = d.midpoint;
    row["central_difference"] = d.central_difference;
    row["formula"] = d.formula;
    checks.push_back(row);
  }
  Json out;
  out["rows"] = rows;
  out["min_margin"] = table.min_margin;
  out["derivative_checks"] = checks;
  out["max_derivative_diff"] = table.max_derivative_diff;
  return out;
}

std::string scan_to_csv(const ScanTable& table) {
  std::string out = "lambda,phi_K,phi_H,margin,crossing_count\n";
  char line[256];
  for (const auto& r : table.rows) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g,%d\n", r.lambda,
                  r.phi_k, r.phi_h, r.margin, r.crossings);
    out += line;
  }
  return out;
}

Json diagnostics_to_json(const CellDiagnostics& diag) {
  Json cells = Json::array();
  for (const auto& c : diag.cells) {
    Json row;
    row["meets_circle"] = c.meets_circle;
    if (c.meets_circle) {
      row["entry"] = c.entry;
      row["exit"] = c.exit;
      row["disconnecting"] = c.disconnecting;
      row["extremal"] = c.extremal;
      Json arcs = Json::array();
      for (const auto& [s, e] : c.arcs.arcs()) arcs.push_back(Json::array({s, e}));
      row["arcs"] = arcs;
    }
    cells.push_back(row);
  }
  Json out;
  out["cells"] = cells;
  out["max_entry"] = diag.max_entry;
  out["origin_site"] = diag.origin_site;
  if (diag.l.has_value()) out["l"] = *diag.l;
  out["ordering"] = diag.ordering;
  if (diag.second_exit.has_value()) out["second_exit"] = *diag.second_exit;
  if (diag.m_bar.has_value()) out["m_bar"] = *diag.m_bar;
  out["has_disconnecting"] = diag.has_disconnecting;
  out["trace_anomalies"] = diag.trace_anomalies;
  return out;
}

Json energy_to_json(const EnergyBreakdown& e) {
  Json out;
  out["free_perimeter"] = e.free_perimeter;
  out["wetted"] = e.wetted;
  out["energy"] = e.energy;
  out["volume"] = e.volume;
  out["reference"] = e.reference;
  out["margin"] = e.margin;
  out["edge_wetted"] = e.edge_wetted;
  return out;
}

Json mesh_to_json(const MarkedMesh& mesh) {
  Json out;
  out["vertices"] = loop_to_json(mesh.vertices);
  Json tris = Json::array();
  for (const auto& t : mesh.triangles) tris.push_back(Json::array({t[0], t[1], t[2]}));
  out["triangles"] = tris;
  Json edges = Json::array();
  for (const auto& e : mesh.boundary_edges) {
    Json row;
    row["a"] = e.a;
    row["b"] = e.b;
    row["marker"] = e.wetted ? "gamma" : "sigma";
    edges.push_back(row);
  }
  out["edge_markers"] = edges;
  out["target_h"] = mesh.target_h;
  return out;
}

Json chain_to_json(const ChainReport& rep) {
  Json out;
  out["measured_a"] = rep.measured_a;
  out["a_stderr"] = rep.a_stderr;
  out["cap_area"] = rep.cap_area;
  out["c"] = rep.c;
  out["upper_bound"] = rep.upper_bound;
  out["tolerance"] = rep.tolerance;
  out["lower_ok"] = rep.lower_ok;
  out["upper_ok"] = rep.upper_ok;
  if (rep.estimates.b_measure.has_value()) {
    out["b_measure"] = *rep.estimates.b_measure;
    out["b_stderr"] = *rep.estimates.b_stderr;
  }
  if (rep.estimates.violation_fraction.has_value()) {
    out["violation_fraction"] = *rep.estimates.violation_fraction;
  }
  out["samples"] = rep.estimates.samples;
  return out;
}

Json fuzz_to_json(const FuzzReport& rep) {
  Json out;
  out["trials"] = rep.trials;
  out["seed"] = rep.seed;
  out["min_measure_margin"] = rep.min_measure_margin;
  if (rep.min_phi_margin < 1e299) out["min_phi_margin"] = rep.min_phi_margin;
  out["violations"] = rep.violations;
  Json offenders = Json::array();
  for (const auto& off : rep.offenders) {
    Json o;
    o["scene"] = contact_scene_to_json(off.config);
    o["lambda"] = off.lambda;
    o["measure_margin"] = off.measure_margin;
    o["phi_margin"] = off.phi_margin;
    o["trial_seed"] = off.trial_seed;
    offenders.push_back(o);
  }
  out["offenders"] = offenders;
  return out;
}

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

}  // namespace abpcap
