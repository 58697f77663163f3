// Command-line front end: phantom, assemble, solve, analyze, report.
//
// Exit status: 0 success, 1 I/O failure, 2 configuration error,
// 3 numerical failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lightray/error.hpp"
#include "lightray/experiment.hpp"
#include "lightray/experiment_config.hpp"
#include "lightray/forward_model.hpp"
#include "lightray/parallel.hpp"
#include "lightray/phantom.hpp"
#include "lightray/slices.hpp"
#include "lightray/spectral.hpp"
#include "lightray/version.hpp"

namespace fs = std::filesystem;
using namespace lightray;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 1;
};

ExperimentConfig load(const Globals& g) {
  ExperimentConfig cfg = g.config.empty() ? desk_example1() : load_config(g.config);
  if (g.seed) cfg.noise.seed = *g.seed;
  if (!g.out.empty()) cfg.output.directory = g.out;
  cfg.validate();
  return cfg;
}

fs::path ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec && fs::is_directory(dir), ErrorCode::Io, "cannot create directory " + dir.string());
  return dir;
}

void cmd_phantom(const Globals& g) {
  const ExperimentConfig cfg = load(g);
  const SpaceTimeGrid grid = cfg.grid.build();
  const StateVector x = rasterize_phantom(cfg.phantom, grid);
  const fs::path dir = ensure_dir(fs::path(cfg.output.directory) / "phantom");
  export_slices(x, grid, dir / "slices", SliceFormats::from_names(cfg.output.formats));
  export_volume(dir / "volume.raw", x, grid);
  std::cout << "phantom " << to_string(cfg.phantom.kind) << ": " << grid.planes() << " slices of " << grid.nx() << "x"
            << grid.nx() << " -> " << dir.string() << "\n";
}

void cmd_assemble(const Globals& g) {
  const ExperimentConfig cfg = load(g);
  const SpaceTimeGrid grid = cfg.grid.build();
  const auto rays = enumerate_rays(grid, cfg.rays.policy());
  AssemblyOptions ao;
  ao.scale_by_segment_length = cfg.rays.scale_by_segment_length;
  const SparseOperator A = assemble_operator(grid, rays, ao);
  const fs::path dir = ensure_dir(cfg.output.directory);
  write_rays_csv(dir / "rays.csv", rays, grid);
  write_matrix_market(dir / "operator.mtx", A);
  std::cout << "operator " << A.rows() << " x " << A.cols() << ", " << A.nonzeros() << " nonzeros -> "
            << (dir / "operator.mtx").string() << "\n";
}

void cmd_solve(const Globals& g, const std::string& method) {
  const ExperimentConfig cfg = load(g);
  RunOptions opts;
  opts.log = [](std::string_view msg) { std::cerr << msg << "\n"; };
  if (method == "all") {
    if (cfg.solvers.empty()) opts.methods = std::vector<Method>{Method::Landweber, Method::Fista, Method::Tikhonov};
  } else {
    opts.methods = std::vector<Method>{method_from_string(method)};
  }
  const ExperimentRun run = run_experiment(cfg, opts);
  std::cout << format_report_table(run.report);
}

void cmd_analyze(const Globals& g, double delta, int trials) {
  const fs::path dir = ensure_dir(fs::path(g.out.empty() ? "out" : g.out) / "analysis");
  const std::uint64_t seed = g.seed.value_or(1);

  std::ofstream stab(dir / "stability.csv");
  stab << "n,convention,delta,min_ratio,max_ratio,analytic_infimum\n";
  for (int n : {2, 3}) {
    for (auto conv : {CnConvention::SphereArea, CnConvention::NormalSymbol}) {
      const auto est = estimate_stability_constant(n, delta, trials, seed, conv);
      stab << n << ',' << (conv == CnConvention::SphereArea ? "sphere_area" : "normal_symbol") << ',' << delta << ','
           << est.min_ratio << ',' << est.max_ratio << ',' << est.analytic_infimum << '\n';
    }
  }

  // Light-like conormal points of the unit sphere in the (t, x) plane.
  std::vector<ArtefactLine> lines;
  const double r = std::numbers::sqrt2 / 2.0;
  for (double st : {1.0, -1.0}) {
    for (double sx : {1.0, -1.0}) {
      Eigen::VectorXd x(2), xi(2);
      x << sx * r, 0.0;
      xi << sx * r, 0.0;
      lines.push_back(predict_artefacts(st * r, x, st * r, xi));
    }
  }
  write_artefact_csv(dir / "artefacts.csv", lines, -2.0, 2.0);

  const GridField probe = null_plane_probe({64, 64, 64}, 8.0, 0.05);
  const auto rows = smoothing_order_check(probe, 2);
  std::ofstream sm(dir / "smoothing.csv");
  sm << "j,slope,gain\n";
  for (const auto& row : rows) sm << row.j << ',' << row.slope << ',' << row.gain << '\n';
  require(stab.good() && sm.good(), ErrorCode::Io, "failed writing analysis output");

  std::cout << "stability, artefact and smoothing diagnostics -> " << dir.string() << "\n";
  for (const auto& row : rows) std::cout << "  j=" << row.j << " gain=" << row.gain << "\n";
}

void cmd_report(const Globals& g, const std::string& run_dir) {
  const fs::path dir = run_dir.empty() ? fs::path(g.out.empty() ? load(g).output.directory : g.out) : fs::path(run_dir);
  const ExperimentReport report = read_run_directory(dir);
  report_table(report, dir);
  std::cout << format_report_table(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Light ray transform reconstruction experiments"};
  app.set_version_flag("--version", std::string(version_string()));
  app.require_subcommand(1);

  Globals g;
  app.add_option("--config", g.config, "Experiment config (TOML, or JSON by extension)");
  app.add_option("--seed", g.seed, "Override the noise seed");
  app.add_option("--out", g.out, "Override the output directory");
  app.add_option("--threads", g.threads, "Worker threads for assembly and matvecs")->check(CLI::PositiveNumber);

  auto* phantom = app.add_subcommand("phantom", "Rasterize the configured phantom and export its slices");
  auto* assemble = app.add_subcommand("assemble", "Enumerate rays, assemble A and export it");
  auto* solve = app.add_subcommand("solve", "Run solvers and print the RRE table");
  std::string method = "all";
  solve->add_option("--method", method, "landweber|fista|tikhonov|gen-tikhonov|all")
      ->check(CLI::IsMember({"landweber", "fista", "tikhonov", "gen-tikhonov", "all"}));
  auto* analyze = app.add_subcommand("analyze", "Spectral diagnostics: stability constant, artefacts, smoothing");
  double delta = 0.1;
  int trials = 100;
  analyze->add_option("--delta", delta, "Space-like cone margin")->check(CLI::Range(0.0, 0.999));
  analyze->add_option("--trials", trials, "Random spectra per estimate")->check(CLI::PositiveNumber);
  auto* report = app.add_subcommand("report", "Rebuild report.csv from a run directory");
  std::string run_dir;
  report->add_option("--run-dir", run_dir, "Run directory (defaults to the output directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    set_thread_count(g.threads);
    if (*phantom) cmd_phantom(g);
    if (*assemble) cmd_assemble(g);
    if (*solve) cmd_solve(g, method);
    if (*analyze) cmd_analyze(g, delta, trials);
    if (*report) cmd_report(g, run_dir);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.category()) {
      case ErrorCategory::Config: return 2;
      case ErrorCategory::Numerical: return 3;
      case ErrorCategory::Io: return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
