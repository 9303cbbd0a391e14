#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "abpcap/partition.hpp"

// Quantitative checks of the lambda-ABP property: exact and Monte Carlo
// measures of the above-level union B^lambda_v, the circle functions
// phi_K / phi_H, per-cell diagnostics (entry/exit values, disconnecting and
// extremal structure, crossing counts) and a randomized fuzzing harness.

namespace abpcap {

class NearBreakpoint : public GeomError {
 public:
  explicit NearBreakpoint(double lambda)
      : GeomError("lambda is within tolerance of a breakpoint level: " +
                  std::to_string(lambda)) {}
};

class NoCellMeetsDisk : public GeomError {
 public:
  NoCellMeetsDisk() : GeomError("no cell meets the open unit disk") {}
};

enum class MeasureMethod { exact, monte_carlo };

struct AbpMeasureResult {
  double value = 0.0;
  MeasureMethod method = MeasureMethod::exact;
  double stderr_ = 0.0;  // 0 for exact
  double radius = 1.0;
  double lambda = 0.0;
  std::vector<double> per_cell;  // per site, sums to value
};

// Sum over sites of |A_i ∩ H^lambda_{nu_i} ∩ D_r|, exactly.
AbpMeasureResult abp_measure_exact(const CellPartition& part, double lambda, double r);

// Rejection sampling in D_r; each sample is assigned to its locate() cell
// (first index on ties) and counted when xi . nu > lambda. Independent
// brute-force oracle for the exact path.
AbpMeasureResult abp_measure_mc(const ContactConfig& cfg, double lambda, double r,
                                long samples, std::uint64_t seed);

// phi_K(lambda) = sum_i H^1(A_i ∩ H^lambda_{nu_i} ∩ ∂D); phi_H = 2 acos.
double phi_K(const CellPartition& part, double lambda);
double phi_H(double lambda);

// Levels where per-cell crossing counts change: heights of arc endpoints
// plus +/-1 where the (anti)normal direction lies inside a cell's trace.
std::vector<double> breakpoint_levels(const CellPartition& part);

// Total number of circle points z in A_i with z . nu_i = lambda. Throws
// NearBreakpoint when lambda is within tol::kBreakpoint of a level where the
// count changes.
int crossing_count(const CellPartition& part, double lambda);

struct ScanRow {
  double lambda = 0.0;
  double phi_k = 0.0;
  double phi_h = 0.0;
  double margin = 0.0;
  int crossings = 0;
};

struct DerivCheckRow {
  double midpoint = 0.0;
  double central_difference = 0.0;  // small-step central difference of phi_K
  double formula = 0.0;             // -crossing_count / sqrt(1 - lambda^2)
};

struct ScanTable {
  std::vector<ScanRow> rows;        // Chebyshev-spaced grid of (-1, 1)
  double min_margin = 0.0;
  std::vector<DerivCheckRow> derivative_checks;  // midpoints clear of breakpoints
  double max_derivative_diff = 0.0;
};

ScanTable phi_scan(const CellPartition& part, int grid_size,
                   bool with_derivative_check = true);

struct CellDiag {
  bool meets_circle = false;
  double entry = 0.0;  // min of z . nu_i over A_i ∩ ∂D
  double exit = 0.0;   // max of z . nu_i over A_i ∩ ∂D
  ArcSet arcs{1.0};
  bool disconnecting = false;
  bool extremal = false;
};

struct CellDiagnostics {
  std::vector<CellDiag> cells;  // per site
  double max_entry = -1.0;      // Lambda
  int origin_site = -1;
  std::optional<double> l;      // max of z . nu_origin over ∂A_origin ∩ ∂D
  std::vector<int> ordering;    // sites meeting ∂D by decreasing exit value
  std::optional<double> second_exit;  // m_2 under the ordering
  std::optional<double> m_bar;        // min of the two per-side maxima
  bool has_disconnecting = false;
  // Non-disconnecting cells whose trace has >= 2 arc components (should not
  // happen for convex cells; logged, not assumed).
  std::vector<int> trace_anomalies;
};

CellDiagnostics cell_diagnostics(const CellPartition& part);

// Randomized stress test of the lambda-ABP inequality.
struct GeneratorSpec {
  enum class BodyKind { mixed, polygon, disk, facet };
  BodyKind body = BodyKind::mixed;
  int min_contacts = 1;
  int max_contacts = 12;
  double value_lo = -2.0;
  double value_hi = 2.0;
  double lambda_lo = -0.95;
  double lambda_hi = 0.95;
  std::optional<double> lambda_fixed;
  int phi_grid = 0;                // 0 disables per-trial phi scans
  bool vertex_contacts = true;     // allow polygon-vertex contacts with cone normals
};

struct FuzzOffender {
  ContactConfig config;
  double lambda = 0.0;
  double measure_margin = 0.0;
  double phi_margin = 0.0;
  std::uint64_t trial_seed = 0;
};

struct FuzzReport {
  int trials = 0;
  std::uint64_t seed = 0;
  double min_measure_margin = 1e300;
  double min_phi_margin = 1e300;
  int violations = 0;
  std::vector<FuzzOffender> offenders;  // capped; serialized for replay
};

// Trials are independent with seeds derived per index, so results (and the
// emitted report) are identical for any thread count.
FuzzReport fuzz_abp(const GeneratorSpec& gen, int trials, std::uint64_t seed,
                    int threads = 1);

// Single fuzz draw, exposed for reuse by the test suites; deterministic in
// the trial seed.
struct FuzzTrialData {
  ContactConfig config;
  double lambda = 0.0;
};
FuzzTrialData fuzz_trial_config(const GeneratorSpec& gen, std::uint64_t trial_seed);

}  // namespace abpcap
