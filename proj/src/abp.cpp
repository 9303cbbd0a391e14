#include "abpcap/abp.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace abpcap {

namespace {

constexpr double kPi = 3.14159265358979323846;

double angle_of(Vec2 v) { return std::atan2(v.y, v.x); }

}  // namespace

AbpMeasureResult abp_measure_exact(const CellPartition& part, double lambda, double r) {
  if (!(std::abs(lambda) < 1.0)) throw InvalidLambda(lambda);
  AbpMeasureResult out;
  out.method = MeasureMethod::exact;
  out.lambda = lambda;
  out.radius = r;
  KahanSum sum;
  out.per_cell.reserve(part.site_count());
  for (std::size_t i = 0; i < part.site_count(); ++i) {
    const double a = part.cells[i].empty()
                         ? 0.0
                         : cell_halfplane_disk_area(
                               part.cells[i], {part.site_normals[i], lambda}, r);
    out.per_cell.push_back(a);
    sum.add(a);
  }
  out.value = sum.value();
  return out;
}

AbpMeasureResult abp_measure_mc(const ContactConfig& cfg, double lambda, double r,
                                long samples, std::uint64_t seed) {
  if (cfg.size() == 0) throw InvalidConfig("monte carlo measure needs contacts");
  if (samples < 1) throw GeomError("samples must be >= 1");
  AbpMeasureResult out;
  out.method = MeasureMethod::monte_carlo;
  out.lambda = lambda;
  out.radius = r;

  // Per-point hit counters; reported per_cell aligns with config indices here
  // (the MC path never merges sites).
  std::vector<long> hits(cfg.size(), 0);
  Rng rng(seed);
  long total = 0;
  long in = 0;
  while (total < samples) {
    const double x = rng.uniform(-r, r);
    const double y = rng.uniform(-r, r);
    if (x * x + y * y > r * r) continue;
    ++total;
    const Vec2 xi{x, y};
    const std::vector<int> owners = locate(cfg, xi);
    const int j = owners.front();
    if (xi.dot(cfg.normals[j]) > lambda) {
      ++hits[j];
      ++in;
    }
  }
  const double disk = kPi * r * r;
  const double p = static_cast<double>(in) / static_cast<double>(samples);
  out.value = disk * p;
  out.stderr_ = disk * std::sqrt(std::max(p * (1.0 - p), 0.0) / samples);
  for (long h : hits) {
    out.per_cell.push_back(disk * static_cast<double>(h) / samples);
  }
  return out;
}

double phi_H(double lambda) { return 2.0 * std::acos(std::clamp(lambda, -1.0, 1.0)); }

namespace {

// Per-site circle traces at radius 1, cached for scans.
struct Traces {
  std::vector<ArcSet> arcs;
  std::vector<double> alpha;  // angle of nu_i
};

Traces unit_traces(const CellPartition& part) {
  Traces t;
  t.arcs.reserve(part.site_count());
  t.alpha.reserve(part.site_count());
  for (std::size_t i = 0; i < part.site_count(); ++i) {
    t.arcs.push_back(part.cells[i].empty() ? ArcSet::empty_set(1.0)
                                           : cell_circle_arcs(part.cells[i], 1.0));
    t.alpha.push_back(angle_of(part.site_normals[i]));
  }
  return t;
}

double phi_from_traces(const Traces& t, double lambda) {
  KahanSum sum;
  for (std::size_t i = 0; i < t.arcs.size(); ++i) {
    if (t.arcs[i].empty()) continue;
    const ArcSet cap = halfplane_circle_arcs({unit_from_angle(t.alpha[i]), lambda}, 1.0);
    sum.add(t.arcs[i].intersect(cap).total_length());
  }
  return sum.value();
}

int crossings_from_traces(const Traces& t, double lambda) {
  int count = 0;
  const double delta = std::acos(std::clamp(lambda, -1.0, 1.0));
  for (std::size_t i = 0; i < t.arcs.size(); ++i) {
    if (t.arcs[i].empty()) continue;
    if (t.arcs[i].contains_angle(t.alpha[i] + delta, 1e-12)) ++count;
    if (t.arcs[i].contains_angle(t.alpha[i] - delta, 1e-12)) ++count;
  }
  return count;
}

std::vector<double> breakpoints_from_traces(const Traces& t) {
  std::vector<double> levels;
  for (std::size_t i = 0; i < t.arcs.size(); ++i) {
    const ArcSet& a = t.arcs[i];
    if (a.empty()) continue;
    for (double theta : a.boundary_angles()) {
      levels.push_back(std::cos(theta - t.alpha[i]));
    }
    if (a.contains_angle(t.alpha[i], 1e-12)) levels.push_back(1.0);
    if (a.contains_angle(t.alpha[i] + kPi, 1e-12)) levels.push_back(-1.0);
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-13; }),
               levels.end());
  return levels;
}

double distance_to_levels(const std::vector<double>& levels, double lambda) {
  double d = 1e300;
  for (double l : levels) d = std::min(d, std::abs(lambda - l));
  return d;
}

}  // namespace

double phi_K(const CellPartition& part, double lambda) {
  return phi_from_traces(unit_traces(part), lambda);
}

std::vector<double> breakpoint_levels(const CellPartition& part) {
  return breakpoints_from_traces(unit_traces(part));
}

int crossing_count(const CellPartition& part, double lambda) {
  if (!(std::abs(lambda) < 1.0)) throw InvalidLambda(lambda);
  const Traces t = unit_traces(part);
  if (distance_to_levels(breakpoints_from_traces(t), lambda) <= tol::kBreakpoint) {
    throw NearBreakpoint(lambda);
  }
  return crossings_from_traces(t, lambda);
}

ScanTable phi_scan(const CellPartition& part, int grid_size,
                   bool with_derivative_check) {
  if (grid_size < 2) throw GeomError("phi_scan needs grid_size >= 2");
  const Traces traces = unit_traces(part);
  const std::vector<double> levels = breakpoints_from_traces(traces);

  ScanTable table;
  table.rows.reserve(grid_size);
  table.min_margin = 1e300;

  std::vector<double> grid(grid_size);
  for (int k = 0; k < grid_size; ++k) {
    // Chebyshev nodes, ascending.
    grid[k] = std::cos(kPi * (2.0 * (grid_size - 1 - k) + 1.0) / (2.0 * grid_size));
  }

  for (int k = 0; k < grid_size; ++k) {
    double lam = grid[k];
    if (distance_to_levels(levels, lam) <= tol::kBreakpoint) {
      lam += tol::kBreakpointNudge;  // eq. holds a.e.; nudge off the kink
    }
    ScanRow row;
    row.lambda = lam;
    row.phi_k = phi_from_traces(traces, lam);
    row.phi_h = phi_H(lam);
    row.margin = row.phi_k - row.phi_h;
    row.crossings = crossings_from_traces(traces, lam);
    table.min_margin = std::min(table.min_margin, row.margin);
    table.rows.push_back(row);
  }

  if (with_derivative_check) {
    const double eps = tol::kFdStep;
    for (int k = 0; k + 1 < grid_size; ++k) {
      const double mid = 0.5 * (table.rows[k].lambda + table.rows[k + 1].lambda);
      if (distance_to_levels(levels, mid) < tol::kFdExclusion) continue;
      if (mid - eps <= -1.0 || mid + eps >= 1.0) continue;
      DerivCheckRow d;
      d.midpoint = mid;
      d.central_difference =
          (phi_from_traces(traces, mid + eps) - phi_from_traces(traces, mid - eps)) /
          (2.0 * eps);
      d.formula = -static_cast<double>(crossings_from_traces(traces, mid)) /
                  std::sqrt(1.0 - mid * mid);
      table.derivative_checks.push_back(d);
      table.max_derivative_diff =
          std::max(table.max_derivative_diff,
                   std::abs(d.central_difference - d.formula));
    }
  }
  return table;
}

CellDiagnostics cell_diagnostics(const CellPartition& part) {
  const Traces traces = unit_traces(part);
  CellDiagnostics diag;
  diag.cells.resize(part.site_count(), CellDiag{});

  bool any = false;
  for (std::size_t i = 0; i < part.site_count(); ++i) {
    CellDiag& d = diag.cells[i];
    d.arcs = traces.arcs[i];
    if (d.arcs.empty()) continue;
    any = true;
    d.meets_circle = true;
    const auto [mn, mx] = linear_range_on_arcs(d.arcs, part.site_normals[i]);
    d.entry = mn;
    d.exit = mx;
    d.disconnecting = d.arcs.component_count(tol::kSharedEdge) >= 2;
    diag.max_entry = std::max(diag.max_entry, d.entry);
  }
  if (!any) throw NoCellMeetsDisk();

  // A non-disconnecting trace splitting at machine tolerance (but merged at
  // the shared-edge tolerance) is logged, never assumed away.
  for (std::size_t i = 0; i < part.site_count(); ++i) {
    const CellDiag& d = diag.cells[i];
    if (d.meets_circle && !d.disconnecting && d.arcs.component_count(1e-12) >= 2) {
      diag.trace_anomalies.push_back(static_cast<int>(i));
    }
  }

  // Origin cell: lowest config index containing the origin.
  const std::vector<int> owners = locate(part.config, {0.0, 0.0});
  diag.origin_site = part.site_of_point[owners.front()];

  // l = max of z . nu_origin over the genuine arc endpoints of the origin
  // cell's trace; absent when the trace is the full circle or empty.
  {
    const ArcSet& a = traces.arcs[diag.origin_site];
    if (!a.empty() && !a.is_full()) {
      double best = -1e300;
      for (double theta : a.boundary_angles(tol::kSharedEdge)) {
        best = std::max(best, std::cos(theta - traces.alpha[diag.origin_site]));
      }
      if (best > -1e299) diag.l = best;
    }
  }

  // Ordering by decreasing exit value; the origin site first among ties.
  for (std::size_t i = 0; i < part.site_count(); ++i) {
    if (diag.cells[i].meets_circle) diag.ordering.push_back(static_cast<int>(i));
  }
  std::sort(diag.ordering.begin(), diag.ordering.end(), [&](int a, int b) {
    if (diag.cells[a].exit != diag.cells[b].exit) {
      return diag.cells[a].exit > diag.cells[b].exit;
    }
    if ((a == diag.origin_site) != (b == diag.origin_site)) {
      return a == diag.origin_site;
    }
    return a < b;
  });
  if (diag.ordering.size() >= 2) {
    diag.second_exit = diag.cells[diag.ordering[1]].exit;
  }

  // Disconnecting / extremal structure and the per-side maxima.
  std::vector<int> disconnecting_sites;
  for (std::size_t i = 0; i < part.site_count(); ++i) {
    if (diag.cells[i].disconnecting) disconnecting_sites.push_back(static_cast<int>(i));
  }
  diag.has_disconnecting = !disconnecting_sites.empty();

  // Gap structure of a disconnecting site: complement components of its
  // trace, with every other circle-meeting site assigned by arc midpoint.
  struct GapInfo {
    double begin = 0.0;  // gap interval (wrapping handled via containment)
    double end = 0.0;
    double max_exit = -1e300;
    bool clean = true;  // contains no disconnecting cell
    bool contains(double theta) const {
      double t = std::fmod(theta - begin, kTwoPi);
      if (t < 0) t += kTwoPi;
      double len = std::fmod(end - begin, kTwoPi);
      if (len <= 0) len += kTwoPi;
      return t <= len;
    }
  };
  auto gaps_of = [&](int site) {
    std::vector<GapInfo> gaps;
    const auto merged = traces.arcs[site].merged_arcs(tol::kSharedEdge);
    for (std::size_t g = 0; g < merged.size(); ++g) {
      GapInfo info;
      info.begin = merged[g].second;                          // end of arc g
      info.end = merged[(g + 1) % merged.size()].first;        // start of next
      gaps.push_back(info);
    }
    for (std::size_t j = 0; j < part.site_count(); ++j) {
      if (static_cast<int>(j) == site || !diag.cells[j].meets_circle) continue;
      const auto jm = traces.arcs[j].merged_arcs(tol::kSharedEdge);
      const double mid = 0.5 * (jm.front().first + jm.front().second);
      for (auto& g : gaps) {
        if (g.contains(mid)) {
          g.max_exit = std::max(g.max_exit, diag.cells[j].exit);
          if (diag.cells[j].disconnecting) g.clean = false;
          break;
        }
      }
    }
    return gaps;
  };

  std::vector<std::vector<GapInfo>> gap_cache;
  gap_cache.reserve(disconnecting_sites.size());
  for (int s : disconnecting_sites) {
    auto gaps = gaps_of(s);
    bool extremal = false;
    for (const auto& g : gaps) {
      if (g.clean) extremal = true;
    }
    diag.cells[s].extremal = extremal;
    gap_cache.push_back(std::move(gaps));
  }

  if (disconnecting_sites.size() == 1) {
    // The unique disconnecting cell: both sides are clean; m_bar is the
    // smaller of the two largest per-gap maxima.
    std::vector<double> maxima;
    for (const auto& g : gap_cache[0]) {
      if (g.max_exit > -1e299) maxima.push_back(g.max_exit);
    }
    std::sort(maxima.rbegin(), maxima.rend());
    if (maxima.size() >= 2) diag.m_bar = maxima[1];
  } else if (disconnecting_sites.size() >= 2) {
    // Two distinct extremal cells; per side take the best clean gap maximum.
    std::vector<int> extremal_sites;
    for (std::size_t k = 0; k < disconnecting_sites.size(); ++k) {
      if (diag.cells[disconnecting_sites[k]].extremal) {
        extremal_sites.push_back(static_cast<int>(k));
      }
    }
    if (extremal_sites.size() >= 2) {
      auto side_max = [&](int k) {
        double best = -1e300;
        for (const auto& g : gap_cache[k]) {
          if (g.clean && g.max_exit > -1e299) best = std::max(best, g.max_exit);
        }
        return best;
      };
      const double m1 = side_max(extremal_sites[0]);
      const double m2 = side_max(extremal_sites[1]);
      if (m1 > -1e299 && m2 > -1e299) diag.m_bar = std::min(m1, m2);
    }
  }

  return diag;
}

// ---------------------------------------------------------------------------
// Fuzzing

FuzzTrialData fuzz_trial_config(const GeneratorSpec& gen, std::uint64_t trial_seed) {
  Rng rng = Rng(trial_seed);
  FuzzTrialData out;

  const int n = static_cast<int>(rng.uniform_int(gen.min_contacts, gen.max_contacts));

  bool use_polygon = false;
  switch (gen.body) {
    case GeneratorSpec::BodyKind::polygon:
      use_polygon = true;
      break;
    case GeneratorSpec::BodyKind::disk:
      use_polygon = false;
      break;
    case GeneratorSpec::BodyKind::mixed:
      use_polygon = rng.uniform() < 0.5;
      break;
    case GeneratorSpec::BodyKind::facet: {
      // All-equal normals: collinear contacts on one supporting line.
      const double phi = rng.uniform(0.0, kTwoPi);
      const Vec2 nu = unit_from_angle(phi);
      const Vec2 tangent = nu.perp();
      const Vec2 base{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      for (int i = 0; i < n; ++i) {
        out.config.points.push_back(base + tangent * rng.uniform(-2.0, 2.0));
        out.config.normals.push_back(nu);
        out.config.values.push_back(rng.uniform(gen.value_lo, gen.value_hi));
      }
      out.lambda = gen.lambda_fixed.value_or(rng.uniform(gen.lambda_lo, gen.lambda_hi));
      return out;
    }
  }

  ConvexSection body =
      use_polygon ? random_convex_polygon(rng)
                  : ConvexSection::disk(rng.uniform(0.3, 2.5),
                                        {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});

  out.config = sample_boundary(body, n, rng.next());
  for (auto& v : out.config.values) v = rng.uniform(gen.value_lo, gen.value_hi);

  // Occasionally plant polygon-vertex contacts with a random normal drawn
  // from the vertex normal cone.
  if (use_polygon && gen.vertex_contacts && body.vertices().size() >= 3) {
    for (int i = 0; i < n; ++i) {
      if (rng.uniform() >= 0.15) continue;
      const std::size_t k =
          static_cast<std::size_t>(rng.uniform_int(0, body.vertices().size() - 1));
      const auto [lo, hi] = body.vertex_normal_cone(k);
      const double a0 = angle_of(lo);
      double span = angle_of(hi) - a0;
      if (span < 0) span += kTwoPi;
      const Vec2 nu = unit_from_angle(a0 + rng.uniform(0.0, 1.0) * span);
      out.config.points[i] = body.vertices()[k];
      out.config.normals[i] = nu;
    }
  }

  out.lambda = gen.lambda_fixed.value_or(rng.uniform(gen.lambda_lo, gen.lambda_hi));
  return out;
}

FuzzReport fuzz_abp(const GeneratorSpec& gen, int trials, std::uint64_t seed,
                    int threads) {
  FuzzReport report;
  report.trials = trials;
  report.seed = seed;
  const Rng master(seed);

  struct TrialOutcome {
    double margin = 1e300;
    double phi_margin = 1e300;
    std::uint64_t trial_seed = 0;
    bool violated = false;
  };
  std::vector<TrialOutcome> outcomes(std::max(trials, 0));

  auto run_range = [&](int begin, int end) {
    for (int t = begin; t < end; ++t) {
      TrialOutcome& out = outcomes[t];
      out.trial_seed = master.derive(static_cast<std::uint64_t>(t)).next();
      const FuzzTrialData trial = fuzz_trial_config(gen, out.trial_seed);
      const CellPartition part = build_cells(trial.config);
      const double measure = abp_measure_exact(part, trial.lambda, 1.0).value;
      out.margin = measure - cap_volume(2, trial.lambda, 1.0);
      if (gen.phi_grid >= 2) {
        out.phi_margin = phi_scan(part, gen.phi_grid, false).min_margin;
      }
      out.violated = out.margin < -tol::kMeasure ||
                     (gen.phi_grid >= 2 && out.phi_margin < -tol::kMeasure);
    }
  };

  threads = std::max(1, threads);
  if (threads == 1 || trials < 2 * threads) {
    run_range(0, trials);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (trials + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
      const int begin = w * chunk;
      const int end = std::min(trials, begin + chunk);
      if (begin < end) pool.emplace_back(run_range, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  for (int t = 0; t < trials; ++t) {
    const TrialOutcome& out = outcomes[t];
    report.min_measure_margin = std::min(report.min_measure_margin, out.margin);
    if (gen.phi_grid >= 2) {
      report.min_phi_margin = std::min(report.min_phi_margin, out.phi_margin);
    }
    if (out.violated) {
      ++report.violations;
      if (report.offenders.size() < 8) {
        const FuzzTrialData trial = fuzz_trial_config(gen, out.trial_seed);
        report.offenders.push_back({trial.config, trial.lambda, out.margin,
                                    gen.phi_grid >= 2 ? out.phi_margin : 0.0,
                                    out.trial_seed});
      }
    }
  }
  return report;
}

}  // namespace abpcap
