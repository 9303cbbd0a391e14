#include "abpcap/geom2d.hpp"

#include <algorithm>
#include <cmath>

namespace abpcap {

namespace {

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  // fmod can return exactly 2pi after the correction when theta is a tiny
  // negative number.
  if (t >= kTwoPi) t -= kTwoPi;
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// ArcSet

ArcSet ArcSet::full(double radius) {
  ArcSet a(radius);
  a.arcs_.push_back({0.0, kTwoPi});
  return a;
}

ArcSet ArcSet::from_interval(double radius, double start, double end) {
  ArcSet a(radius);
  if (end - start >= kTwoPi) return full(radius);
  if (end - start <= 0.0) return a;
  const double s = wrap_angle(start);
  const double span = end - start;
  double e = s + span;
  if (e <= kTwoPi) {
    a.arcs_.push_back({s, e});
  } else {
    a.arcs_.push_back({0.0, e - kTwoPi});
    a.arcs_.push_back({s, kTwoPi});
  }
  return a;
}

double ArcSet::total_angle() const {
  KahanSum sum;
  for (const auto& [s, e] : arcs_) sum.add(e - s);
  return sum.value();
}

ArcSet ArcSet::intersect(const ArcSet& other) const {
  ArcSet out(radius_);
  for (const auto& [s1, e1] : arcs_) {
    for (const auto& [s2, e2] : other.arcs_) {
      const double s = std::max(s1, s2);
      const double e = std::min(e1, e2);
      if (e - s > 1e-15) out.arcs_.push_back({s, e});
    }
  }
  std::sort(out.arcs_.begin(), out.arcs_.end());
  return out;
}

bool ArcSet::contains_angle(double theta, double angle_tol) const {
  const double t = wrap_angle(theta);
  for (const auto& [s, e] : arcs_) {
    if (t >= s - angle_tol && t <= e + angle_tol) return true;
  }
  // Wrap cases: t near 0 against an arc ending at 2pi, and vice versa.
  for (const auto& [s, e] : arcs_) {
    if (t + kTwoPi >= s - angle_tol && t + kTwoPi <= e + angle_tol) return true;
    if (t - kTwoPi >= s - angle_tol && t - kTwoPi <= e + angle_tol) return true;
  }
  return false;
}

std::vector<std::pair<double, double>> ArcSet::merged_arcs(double angle_tol) const {
  std::vector<std::pair<double, double>> m = arcs_;
  if (m.empty()) return m;
  // Merge records adjacent within tolerance.
  std::vector<std::pair<double, double>> out;
  for (const auto& a : m) {
    if (!out.empty() && a.first <= out.back().second + angle_tol) {
      out.back().second = std::max(out.back().second, a.second);
    } else {
      out.push_back(a);
    }
  }
  // Merge across the wrap at 0.
  if (out.size() >= 2) {
    const bool touches_zero = out.front().first <= angle_tol;
    const bool touches_twopi = out.back().second >= kTwoPi - angle_tol;
    if (touches_zero && touches_twopi) {
      out.back().second = kTwoPi + out.front().second;
      out.erase(out.begin());
    }
  }
  return out;
}

int ArcSet::component_count(double angle_tol) const {
  if (is_full()) return 1;
  return static_cast<int>(merged_arcs(angle_tol).size());
}

std::vector<double> ArcSet::boundary_angles(double angle_tol) const {
  std::vector<double> out;
  if (is_full()) return out;
  for (const auto& [s, e] : merged_arcs(angle_tol)) {
    out.push_back(wrap_angle(s));
    out.push_back(wrap_angle(e));
  }
  return out;
}

ArcSet halfplane_circle_arcs(const HalfPlane& h, double r) {
  const double u = h.offset / r;
  if (u >= 1.0) return ArcSet::empty_set(r);
  if (u <= -1.0) return ArcSet::full(r);
  const double alpha = std::atan2(h.normal.y, h.normal.x);
  const double delta = std::acos(u);
  return ArcSet::from_interval(r, alpha - delta, alpha + delta);
}

// ---------------------------------------------------------------------------
// ConvexCell

std::vector<Vec2> clip_loop(const std::vector<Vec2>& loop, const HalfPlane& h) {
  std::vector<Vec2> out;
  const std::size_t n = loop.size();
  if (n == 0) return out;
  out.reserve(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p = loop[i];
    const Vec2 q = loop[(i + 1) % n];
    const double dp = h.signed_excess(p);
    const double dq = h.signed_excess(q);
    if (dp >= 0.0) out.push_back(p);
    if ((dp > 0.0 && dq < 0.0) || (dp < 0.0 && dq > 0.0)) {
      const double t = dp / (dp - dq);
      out.push_back(p + (q - p) * t);
    }
  }
  return out;
}

double point_segment_distance(Vec2 x, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double len2 = d.norm2();
  if (len2 == 0.0) return (x - a).norm();
  const double t = std::clamp((x - a).dot(d) / len2, 0.0, 1.0);
  return (x - (a + d * t)).norm();
}

double polygon_area(const std::vector<Vec2>& loop) {
  KahanSum sum;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    sum.add(loop[i].cross(loop[(i + 1) % n]));
  }
  return 0.5 * sum.value();
}

namespace {

std::vector<Vec2> box_loop() {
  const double r = kBoxHalfWidth;
  return {{-r, -r}, {r, -r}, {r, r}, {-r, r}};
}

std::vector<Vec2> clip_all(const std::vector<HalfPlane>& planes) {
  std::vector<Vec2> loop = box_loop();
  for (const auto& h : planes) {
    loop = clip_loop(loop, h);
    if (loop.size() < 3) return {};
  }
  if (polygon_area(loop) <= tol::kEmptyArea) return {};
  return loop;
}

}  // namespace

ConvexCell::ConvexCell() { loop_ = box_loop(); }

ConvexCell ConvexCell::empty_cell() {
  ConvexCell cell;
  cell.empty_ = true;
  cell.loop_.clear();
  return cell;
}

ConvexCell ConvexCell::from_halfplanes(std::vector<HalfPlane> planes,
                                       std::vector<int> sources) {
  ConvexCell cell;
  if (sources.empty()) sources.assign(planes.size(), -1);

  // Deduplicate (anti)parallel constraints. Parallel: keep the larger offset.
  // Antiparallel pairs forming a slab of width <= tol::kFeasibility mean an
  // empty cell.
  std::vector<HalfPlane> dedup;
  std::vector<int> dsrc;
  for (std::size_t i = 0; i < planes.size(); ++i) {
    bool absorbed = false;
    for (std::size_t j = 0; j < dedup.size(); ++j) {
      const double d = planes[i].normal.dot(dedup[j].normal);
      if (d > 1.0 - tol::kUnitNormal) {
        if (planes[i].offset > dedup[j].offset) {
          dedup[j] = planes[i];
          dsrc[j] = sources[i];
        }
        absorbed = true;
        break;
      }
      if (d < -1.0 + tol::kUnitNormal) {
        if (planes[i].offset + dedup[j].offset >= -tol::kFeasibility) {
          cell.empty_ = true;
          cell.planes_ = std::move(planes);
          cell.sources_ = std::move(sources);
          cell.loop_.clear();
          return cell;
        }
      }
    }
    if (!absorbed) {
      dedup.push_back(planes[i]);
      dsrc.push_back(sources[i]);
    }
  }

  std::vector<Vec2> loop = clip_all(dedup);
  if (loop.empty()) {
    cell.empty_ = true;
    cell.planes_ = std::move(dedup);
    cell.sources_ = std::move(dsrc);
    cell.loop_.clear();
    return cell;
  }
  const double full_area = polygon_area(loop);

  // Prune redundant constraints. Cheap screen first: a constraint whose line
  // stays clear of the loop is redundant; one carving a positive-length edge
  // is active. Ambiguous ones are settled by re-clipping without them.
  std::vector<HalfPlane> kept;
  std::vector<int> ksrc;
  for (std::size_t i = 0; i < dedup.size(); ++i) {
    double mn = 1e300;
    for (const Vec2& v : loop) mn = std::min(mn, dedup[i].signed_excess(v));
    if (mn > 1e-7) continue;  // line clear of the loop: redundant
    if (mn < -1e-7) {         // line strictly carves the loop: active
      kept.push_back(dedup[i]);
      ksrc.push_back(dsrc[i]);
      continue;
    }
    std::vector<HalfPlane> rest;
    for (std::size_t j = 0; j < dedup.size(); ++j) {
      if (j != i) rest.push_back(dedup[j]);
    }
    const std::vector<Vec2> wider = clip_all(rest);
    const double grown = polygon_area(wider) - full_area;
    if (grown > tol::kEmptyArea) {
      kept.push_back(dedup[i]);
      ksrc.push_back(dsrc[i]);
    }
  }

  cell.planes_ = std::move(kept);
  cell.sources_ = std::move(ksrc);
  cell.loop_ = clip_all(cell.planes_);
  if (cell.loop_.empty()) cell.empty_ = true;
  return cell;
}

double ConvexCell::clipped_area() const {
  if (empty_ || loop_.empty()) return 0.0;
  return polygon_area(loop_);
}

bool ConvexCell::contains(Vec2 z, double slack) const {
  if (empty_) return false;
  for (const auto& h : planes_) {
    if (h.signed_excess(z) < -slack) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Measures

ArcSet cell_circle_arcs(const ConvexCell& cell, double r) {
  if (cell.empty()) return ArcSet::empty_set(r);
  ArcSet arcs = ArcSet::full(r);
  for (const auto& h : cell.halfplanes()) {
    arcs = arcs.intersect(halfplane_circle_arcs(h, r));
    if (arcs.empty()) break;
  }
  return arcs;
}

ArcSet cell_halfplane_circle_arcs(const ConvexCell& cell, const HalfPlane& h, double r) {
  if (cell.empty()) return ArcSet::empty_set(r);
  return cell_circle_arcs(cell, r).intersect(halfplane_circle_arcs(h, r));
}

namespace {

// Adds the divergence-theorem contribution of the part of segment [p, q]
// inside the closed disk of radius r.
void add_segment_in_disk(KahanSum& sum, Vec2 p, Vec2 q, double r) {
  const Vec2 d = q - p;
  const double a = d.norm2();
  if (a == 0.0) return;
  const double b = 2.0 * p.dot(d);
  const double c = p.norm2() - r * r;
  const double disc = b * b - 4.0 * a * c;
  if (disc <= 0.0) return;
  const double sq = std::sqrt(disc);
  const double t_lo = std::max(0.0, (-b - sq) / (2.0 * a));
  const double t_hi = std::min(1.0, (-b + sq) / (2.0 * a));
  if (t_hi <= t_lo) return;
  const Vec2 a2 = p + d * t_lo;
  const Vec2 b2 = p + d * t_hi;
  sum.add(a2.cross(b2));
}

double disk_area_from_parts(const std::vector<Vec2>& loop, const ArcSet& arcs, double r) {
  KahanSum sum;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    add_segment_in_disk(sum, loop[i], loop[(i + 1) % n], r);
  }
  double area = 0.5 * sum.value();
  KahanSum arc_sum;
  for (const auto& [s, e] : arcs.arcs()) arc_sum.add(e - s);
  area += 0.5 * r * r * arc_sum.value();
  // Guard roundoff at the extremes.
  const double cap = kTwoPi * 0.5 * r * r;
  return std::clamp(area, 0.0, cap);
}

}  // namespace

double cell_disk_area(const ConvexCell& cell, double r) {
  if (cell.empty()) return 0.0;
  return disk_area_from_parts(cell.loop(), cell_circle_arcs(cell, r), r);
}

double cell_halfplane_disk_area(const ConvexCell& cell, const HalfPlane& h, double r) {
  if (cell.empty()) return 0.0;
  const std::vector<Vec2> loop = clip_loop(cell.loop(), h);
  if (loop.size() < 3) return 0.0;
  const ArcSet arcs = cell_circle_arcs(cell, r).intersect(halfplane_circle_arcs(h, r));
  return disk_area_from_parts(loop, arcs, r);
}

std::pair<double, double> linear_range_on_arcs(const ArcSet& arcs, Vec2 nu) {
  if (arcs.empty()) throw EmptyArcSet();
  const double r = arcs.radius();
  const double alpha = std::atan2(nu.y, nu.x);
  double mn = 1e300;
  double mx = -1e300;
  auto eval = [&](double theta) {
    const double v = r * std::cos(theta - alpha);
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  };
  for (const auto& [s, e] : arcs.arcs()) {
    eval(s);
    eval(e);
  }
  if (arcs.contains_angle(alpha)) mx = r;
  if (arcs.contains_angle(alpha + kTwoPi * 0.5)) mn = -r;
  return {mn, mx};
}

// ---------------------------------------------------------------------------
// Caps

namespace {

double unit_ball_volume(int dim) {
  // omega_k = pi^{k/2} / Gamma(k/2 + 1)
  return std::exp(0.5 * dim * std::log(M_PI) - std::lgamma(0.5 * dim + 1.0));
}

double adaptive_simpson(double (*f)(double, int), int dim, double a, double b,
                        double fa, double fm, double fb, double whole, double tol_abs,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm, dim);
  const double frm = f(rm, dim);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol_abs) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, dim, a, m, fa, flm, fm, left, 0.5 * tol_abs, depth - 1) +
         adaptive_simpson(f, dim, m, b, fm, frm, fb, right, 0.5 * tol_abs, depth - 1);
}

double cap_integrand(double t, int dim) {
  return unit_ball_volume(dim - 1) * std::pow(std::max(0.0, 1.0 - t * t), 0.5 * (dim - 1));
}

}  // namespace

double cap_volume(int dim, double lambda, double r) {
  if (!(std::abs(lambda) < 1.0)) throw InvalidLambda(lambda);
  if (!(r > 0.0) || dim < 2) throw GeomError("cap_volume: need r > 0 and N >= 2");
  double unit;
  if (dim == 2) {
    unit = std::acos(lambda) - lambda * std::sqrt(1.0 - lambda * lambda);
  } else if (dim == 3) {
    unit = M_PI * (2.0 / 3.0 - lambda + lambda * lambda * lambda / 3.0);
  } else {
    const double a = lambda;
    const double b = 1.0;
    const double fa = cap_integrand(a, dim);
    const double fm = cap_integrand(0.5 * (a + b), dim);
    const double fb = cap_integrand(b, dim);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    unit = adaptive_simpson(cap_integrand, dim, a, b, fa, fm, fb, whole,
                            tol::kCapQuadrature, 48);
  }
  return std::pow(r, dim) * unit;
}

double halfplane_disk_area(double r, double offset) {
  if (offset >= r) return 0.0;
  if (offset <= -r) return kTwoPi * 0.5 * r * r;
  return r * r * std::acos(offset / r) - offset * std::sqrt(r * r - offset * offset);
}

}  // namespace abpcap
