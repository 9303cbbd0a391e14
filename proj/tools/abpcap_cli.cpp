// Command-line surface: scene ingestion, dispatch, deterministic run
// configuration, and CSV/JSON/SVG emission.
//
// Exit codes: 0 success, 1 input error, 2 inequality violation found.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "abpcap/abp.hpp"
#include "abpcap/capillary.hpp"
#include "abpcap/jsonio.hpp"
#include "abpcap/neumann.hpp"
#include "abpcap/partition.hpp"
#include "abpcap/svg.hpp"

namespace {

using abpcap::Json;

struct Options {
  std::string command;
  std::string scene_path;
  std::uint64_t seed = 1;
  std::optional<double> lambda;
  int lambda_grid = 257;
  long samples = 100000;
  int trials = 1000;
  std::string out_json;
  std::string out_csv;
  std::string out_svg;
  std::vector<std::string> tol_overrides;
  std::string fuzz_body = "mixed";
  int phi_grid = 0;
  std::optional<double> mesh_h;
};

int thread_budget() {
  const char* env = std::getenv("ABPCAP_THREADS");
  if (env == nullptr) return 1;
  const int n = std::atoi(env);
  return n > 0 ? n : 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw abpcap::InputError("cannot open scene file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw abpcap::InputError("cannot write output file: " + path);
  out << content;
}

std::map<std::string, double> parse_overrides(const std::vector<std::string>& raw) {
  std::map<std::string, double> out;
  for (const std::string& kv : raw) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw abpcap::InputError("tolerance override must be KEY=VAL: " + kv);
    }
    out[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
  }
  return out;
}

// Report envelope shared by all commands: inputs, seed, version, tolerances.
Json envelope(const Options& opt, const std::string& input_hash,
              const std::map<std::string, double>& tols) {
  Json out;
  out["command"] = opt.command;
  out["version"] = abpcap::kVersion;
  out["seed"] = opt.seed;
  out["input_hash"] = input_hash;
  Json jt;
  for (const auto& [k, v] : tols) jt[k] = v;
  out["tolerances"] = jt;
  return out;
}

std::map<std::string, double> default_tolerances() {
  using namespace abpcap::tol;
  return {{"measure", kMeasure},
          {"supporting", kSupporting},
          {"argmax_tie", kArgmaxTie},
          {"shared_edge", kSharedEdge},
          {"breakpoint", kBreakpoint},
          {"snap", kSnapDefault},
          {"chain_h_coeff", abpcap::kChainToleranceH}};
}

int run(const Options& opt) {
  std::map<std::string, double> tols = default_tolerances();
  for (const auto& [k, v] : parse_overrides(opt.tol_overrides)) {
    if (!tols.count(k)) throw abpcap::InputError("unknown tolerance key: " + k);
    tols[k] = v;
  }
  const double violation_gate = tols["measure"];

  std::string scene_bytes;
  if (!opt.scene_path.empty()) scene_bytes = read_file(opt.scene_path);
  Json report = envelope(opt, abpcap::content_hash(scene_bytes), tols);
  int status = 0;

  if (opt.command == "partition") {
    const abpcap::ContactConfig cfg =
        abpcap::parse_contact_scene(Json::parse(scene_bytes));
    const abpcap::CellPartition part = abpcap::build_cells(cfg);
    report["partition"] = abpcap::partition_to_json(part);
    report["diagnostics"] = abpcap::diagnostics_to_json(abpcap::cell_diagnostics(part));
    if (!opt.out_svg.empty()) {
      write_file(opt.out_svg, abpcap::svg_partition(part, opt.lambda.value_or(0.0)));
    }
  } else if (opt.command == "check-abp") {
    const abpcap::ContactConfig cfg =
        abpcap::parse_contact_scene(Json::parse(scene_bytes));
    const abpcap::CellPartition part = abpcap::build_cells(cfg);
    const double lambda = opt.lambda.value_or(0.0);
    const abpcap::AbpMeasureResult exact = abpcap::abp_measure_exact(part, lambda, 1.0);
    const double cap = abpcap::cap_volume(2, lambda, 1.0);
    report["measure"] = abpcap::measure_to_json(exact);
    report["cap_area"] = cap;
    report["margin"] = exact.value - cap;
    if (opt.samples > 0) {
      const abpcap::AbpMeasureResult mc =
          abpcap::abp_measure_mc(cfg, lambda, 1.0, opt.samples, opt.seed);
      report["monte_carlo"] = abpcap::measure_to_json(mc);
      report["oracle_gap"] = std::abs(exact.value - mc.value);
      report["oracle_ok"] =
          std::abs(exact.value - mc.value) <= 3.0 * mc.stderr_ + violation_gate;
    }
    if (exact.value - cap < -violation_gate) status = 2;
    if (!opt.out_svg.empty()) {
      write_file(opt.out_svg, abpcap::svg_partition(part, lambda));
    }
  } else if (opt.command == "phi-scan") {
    const abpcap::ContactConfig cfg =
        abpcap::parse_contact_scene(Json::parse(scene_bytes));
    const abpcap::CellPartition part = abpcap::build_cells(cfg);
    const abpcap::ScanTable table = abpcap::phi_scan(part, opt.lambda_grid);
    report["scan"] = abpcap::scan_to_json(table);
    if (table.min_margin < -violation_gate) status = 2;
    if (!opt.out_csv.empty()) write_file(opt.out_csv, abpcap::scan_to_csv(table));
    if (!opt.out_svg.empty()) {
      write_file(opt.out_svg, abpcap::svg_partition(part, 0.0));
    }
  } else if (opt.command == "capillary") {
    abpcap::SceneWithMesh sm = abpcap::parse_capillary_scene(Json::parse(scene_bytes));
    if (tols.count("snap")) sm.scene.snap = tols["snap"];
    const abpcap::IsoperimetricReport iso = abpcap::isoperimetric_check(sm.scene);
    report["energy"] = abpcap::energy_to_json(iso.breakdown);
    report["violated"] = iso.breakdown.margin < -violation_gate;
    if (iso.breakdown.margin < -violation_gate) status = 2;
    if (!opt.out_svg.empty()) {
      write_file(opt.out_svg, abpcap::svg_capillary(sm.scene, iso.breakdown));
    }
  } else if (opt.command == "neumann-chain") {
    abpcap::SceneWithMesh sm = abpcap::parse_capillary_scene(Json::parse(scene_bytes));
    const double h = opt.mesh_h.value_or(sm.has_h ? sm.h : 0.05);
    const abpcap::MarkedMesh mesh =
        abpcap::build_marked_mesh(sm.scene.droplet, sm.scene.obstacle, h, sm.scene.snap);
    const abpcap::NeumannSolution sol = abpcap::solve_neumann(mesh, sm.scene.lambda);
    abpcap::ChainReport chain = abpcap::abp_chain_report(sol, opt.samples, opt.seed);
    chain.tolerance = 3.0 * chain.a_stderr + tols["chain_h_coeff"] * h;
    chain.lower_ok = chain.measured_a >= chain.cap_area - chain.tolerance;
    chain.upper_ok = chain.measured_a <= chain.upper_bound + chain.tolerance;
    report["mesh"] = abpcap::mesh_to_json(mesh);
    report["c"] = sol.c;
    report["area"] = sol.area;
    report["sigma_length"] = sol.sigma_len;
    report["gamma_length"] = sol.gamma_len;
    report["residual_rel"] = sol.residual_rel;
    report["chain"] = abpcap::chain_to_json(chain);
    if (!chain.lower_ok || !chain.upper_ok) status = 2;
    if (!opt.out_svg.empty()) write_file(opt.out_svg, abpcap::svg_mesh(mesh));
  } else if (opt.command == "fuzz") {
    abpcap::GeneratorSpec gen;
    if (opt.fuzz_body == "polygon") {
      gen.body = abpcap::GeneratorSpec::BodyKind::polygon;
    } else if (opt.fuzz_body == "disk") {
      gen.body = abpcap::GeneratorSpec::BodyKind::disk;
    } else if (opt.fuzz_body == "facet") {
      gen.body = abpcap::GeneratorSpec::BodyKind::facet;
    } else if (opt.fuzz_body != "mixed") {
      throw abpcap::InputError("unknown fuzz body kind: " + opt.fuzz_body);
    }
    gen.lambda_fixed = opt.lambda;
    gen.phi_grid = opt.phi_grid;
    const abpcap::FuzzReport fuzz =
        abpcap::fuzz_abp(gen, opt.trials, opt.seed, thread_budget());
    report["fuzz"] = abpcap::fuzz_to_json(fuzz);
    if (fuzz.violations > 0) status = 2;
  } else {
    throw abpcap::InputError("unknown command: " + opt.command);
  }

  report["status"] = status;
  const std::string serialized = report.dump(2) + "\n";
  if (!opt.out_json.empty()) {
    write_file(opt.out_json, serialized);
  } else {
    std::cout << serialized;
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"abpcap: capillary isoperimetric verification toolkit"};
  app.set_version_flag("--version", std::string(abpcap::kVersion));

  Options opt;
  app.add_option("command", opt.command,
                 "one of: partition, check-abp, phi-scan, capillary, "
                 "neumann-chain, fuzz")
      ->required();
  app.add_option("--scene", opt.scene_path, "scene JSON path");
  app.add_option("--seed", opt.seed, "run seed (embedded in reports)");
  app.add_option("--lambda", opt.lambda, "contact-angle parameter in (-1, 1)");
  app.add_option("--lambda-grid", opt.lambda_grid, "phi scan grid size");
  app.add_option("--samples", opt.samples, "Monte Carlo sample count");
  app.add_option("--trials", opt.trials, "fuzz trial count");
  app.add_option("--mesh-h", opt.mesh_h, "mesh target edge length (neumann-chain)");
  app.add_option("--body", opt.fuzz_body, "fuzz body kind: mixed|polygon|disk|facet");
  app.add_option("--phi-grid", opt.phi_grid, "per-trial phi grid in fuzz (0 = off)");
  app.add_option("--out-json", opt.out_json, "write the JSON report here");
  app.add_option("--out-csv", opt.out_csv, "write scan CSV here");
  app.add_option("--out-svg", opt.out_svg, "write an SVG rendering here");
  app.add_option("--tol-override", opt.tol_overrides,
                 "override a tolerance, KEY=VAL (repeatable)");

  CLI11_PARSE(app, argc, argv);

  try {
    return run(opt);
  } catch (const abpcap::GeomError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Json::exception& e) {
    std::cerr << "error: invalid scene JSON: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
