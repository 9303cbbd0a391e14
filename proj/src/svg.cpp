#include "abpcap/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace abpcap {

namespace {

constexpr int kCanvas = 640;

struct Frame {
  double cx = 0.0;
  double cy = 0.0;
  double scale = 1.0;  // world units -> pixels

  std::pair<double, double> map(Vec2 p) const {
    return {(p.x - cx) * scale + kCanvas / 2.0, (cy - p.y) * scale + kCanvas / 2.0};
  }
};

Frame fit_frame(const std::vector<Vec2>& pts, double pad) {
  double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
  for (const Vec2& p : pts) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  }
  Frame f;
  f.cx = 0.5 * (lo_x + hi_x);
  f.cy = 0.5 * (lo_y + hi_y);
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 0.5}) + 2.0 * pad;
  f.scale = kCanvas / span;
  return f;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string path_of(const std::vector<Vec2>& loop, const Frame& f, bool close) {
  std::string d;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const auto [x, y] = f.map(loop[i]);
    d += (i == 0 ? "M" : "L") + fmt(x) + " " + fmt(y) + " ";
  }
  if (close && !loop.empty()) d += "Z";
  return d;
}

std::string cell_color(std::size_t i) {
  static const char* palette[] = {"#7fb3d5", "#f5b041", "#82e0aa", "#d98880",
                                  "#bb8fce", "#76d7c4", "#f7dc6f", "#aeb6bf",
                                  "#e59866", "#85c1e9", "#f1948a", "#73c6b6"};
  return palette[i % (sizeof(palette) / sizeof(palette[0]))];
}

std::string header() {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
                "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
                kCanvas, kCanvas, kCanvas, kCanvas);
  return std::string(buf) +
         "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
}

std::string text(double x, double y, const std::string& s) {
  return "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) +
         "\" font-family=\"monospace\" font-size=\"13\" fill=\"#333\">" + s +
         "</text>\n";
}

std::vector<Vec2> clip_to_viewport(const std::vector<Vec2>& loop, double half) {
  std::vector<Vec2> out = loop;
  const HalfPlane planes[4] = {{{1, 0}, -half}, {{-1, 0}, -half},
                               {{0, 1}, -half}, {{0, -1}, -half}};
  for (const auto& h : planes) {
    out = clip_loop(out, h);
    if (out.size() < 3) return {};
  }
  return out;
}

}  // namespace

std::string svg_partition(const CellPartition& part, double lambda) {
  const double view = 1.6;
  Frame f;
  f.scale = kCanvas / (2.0 * view);
  std::string svg = header();

  for (std::size_t i = 0; i < part.site_count(); ++i) {
    if (part.cells[i].empty()) continue;
    const std::vector<Vec2> loop = clip_to_viewport(part.cells[i].loop(), view);
    if (loop.size() < 3) continue;
    svg += "<path d=\"" + path_of(loop, f, true) + "\" fill=\"" + cell_color(i) +
           "\" fill-opacity=\"0.55\" stroke=\"#555\" stroke-width=\"1\"/>\n";
  }

  // Unit circle.
  const auto [ox, oy] = f.map({0, 0});
  svg += "<circle cx=\"" + fmt(ox) + "\" cy=\"" + fmt(oy) + "\" r=\"" +
         fmt(f.scale) + "\" fill=\"none\" stroke=\"#000\" stroke-width=\"1.5\"/>\n";

  // Lambda-level chords per cell normal: {z . nu_i = lambda} across the disk.
  for (std::size_t i = 0; i < part.site_count(); ++i) {
    if (part.cells[i].empty()) continue;
    if (std::abs(lambda) >= 1.0) continue;
    const Vec2 nu = part.site_normals[i];
    const Vec2 base = nu * lambda;
    const Vec2 t = nu.perp();
    const double half_len = std::sqrt(std::max(0.0, 1.0 - lambda * lambda));
    const auto [x1, y1] = f.map(base + t * half_len);
    const auto [x2, y2] = f.map(base - t * half_len);
    svg += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) +
           "\" y2=\"" + fmt(y2) +
           "\" stroke=\"#c0392b\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n";
  }

  svg += text(12, 22, "cells: " + std::to_string(part.site_count()) +
                          "  lambda: " + fmt(lambda));
  svg += text(12, 40, "dashed: level chords z.nu = lambda");
  svg += "</svg>\n";
  return svg;
}

std::string svg_capillary(const CapillaryScene& scene, const EnergyBreakdown& e) {
  std::vector<Vec2> all = scene.droplet;
  if (scene.obstacle.kind() == ConvexSection::Kind::disk) {
    const Vec2 c = scene.obstacle.disk_center();
    const double r = scene.obstacle.disk_radius();
    all.push_back(c + Vec2{r, r});
    all.push_back(c - Vec2{r, r});
  } else {
    for (const Vec2& v : scene.obstacle.vertices()) all.push_back(v);
  }
  const Frame f = fit_frame(all, 0.3);
  std::string svg = header();

  if (scene.obstacle.kind() == ConvexSection::Kind::disk) {
    const auto [cx, cy] = f.map(scene.obstacle.disk_center());
    svg += "<circle cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) + "\" r=\"" +
           fmt(scene.obstacle.disk_radius() * f.scale) +
           "\" fill=\"#d5d8dc\" stroke=\"#555\"/>\n";
  } else {
    svg += "<path d=\"" + path_of(scene.obstacle.vertices(), f, true) +
           "\" fill=\"#d5d8dc\" stroke=\"#555\"/>\n";
  }

  svg += "<path d=\"" + path_of(scene.droplet, f, true) +
         "\" fill=\"#aed6f1\" fill-opacity=\"0.6\" stroke=\"none\"/>\n";
  const std::size_t n = scene.droplet.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto [x1, y1] = f.map(scene.droplet[i]);
    const auto [x2, y2] = f.map(scene.droplet[(i + 1) % n]);
    const bool wet = i < e.edge_wetted.size() && e.edge_wetted[i];
    svg += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) +
           "\" y2=\"" + fmt(y2) + "\" stroke=\"" +
           (wet ? std::string("#c0392b") : std::string("#1f618d")) +
           "\" stroke-width=\"" + (wet ? "4" : "2") + "\"/>\n";
  }

  svg += text(12, 22, "J = " + fmt(e.energy) + "  ref = " + fmt(e.reference) +
                          "  margin = " + fmt(e.margin));
  svg += text(12, 40, "red: wetted edges, blue: free interface");
  svg += "</svg>\n";
  return svg;
}

std::string svg_mesh(const MarkedMesh& mesh) {
  const Frame f = fit_frame(mesh.vertices, 0.2);
  std::string svg = header();
  for (const auto& t : mesh.triangles) {
    svg += "<path d=\"" +
           path_of({mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]}, f,
                   true) +
           "\" fill=\"#fbfcfc\" stroke=\"#d5d8dc\" stroke-width=\"0.5\"/>\n";
  }
  for (const auto& e : mesh.boundary_edges) {
    const auto [x1, y1] = f.map(mesh.vertices[e.a]);
    const auto [x2, y2] = f.map(mesh.vertices[e.b]);
    svg += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) +
           "\" y2=\"" + fmt(y2) + "\" stroke=\"" +
           (e.wetted ? std::string("#c0392b") : std::string("#1f618d")) +
           "\" stroke-width=\"2\"/>\n";
  }
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (mesh.vertex_class[i] == VertexClass::contact) {
      const auto [x, y] = f.map(mesh.vertices[i]);
      svg += "<circle cx=\"" + fmt(x) + "\" cy=\"" + fmt(y) +
             "\" r=\"4\" fill=\"#17a589\"/>\n";
    }
  }
  svg += text(12, 22, "vertices: " + std::to_string(mesh.vertices.size()) +
                          "  triangles: " + std::to_string(mesh.triangles.size()) +
                          "  min angle: " + fmt(mesh.min_angle_deg()) + " deg");
  svg += text(12, 40, "red: wetted, blue: free, dots: contact set");
  svg += "</svg>\n";
  return svg;
}

}  // namespace abpcap
